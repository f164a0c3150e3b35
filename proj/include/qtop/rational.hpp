#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>

namespace qtop {

/// Exact rational number. All arithmetic in decision paths is exact; doubles
/// appear only in reporting helpers.
using Rational = mpq_class;

inline double to_double(const Rational& x) { return mpq_get_d(x.get_mpq_t()); }

inline std::string to_string(const Rational& x) { return x.get_str(); }

}  // namespace qtop
