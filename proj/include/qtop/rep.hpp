#pragma once

// Finite-dimensional modules over the small quantum group: the simple modules
// V_n and projective covers P_n, tensor products and duals, intertwiner
// spaces, greedy Krull-Schmidt decomposition against the catalogue, quantum
// dimensions and traces, and the end-structure morphisms on the adjoint
// representation.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtop/hopf.hpp"
#include "qtop/linalg.hpp"

namespace qtop {

using AlgebraPtr = std::shared_ptr<SmallQuantumSl2>;

/// A module given by its three generator action matrices. The defining
/// relations are checked once at construction time.
struct Representation {
  FieldPtr ctx;
  std::string label;
  std::size_t dim = 0;
  Matrix actK, actE, actF;
  /// K-eigenvalue exponents (K v_i = q^{weights[i]} v_i) when actK is
  /// diagonal with q-power entries; used to prune intertwiner unknowns.
  std::optional<std::vector<long>> weights;
};

using RepPtr = std::shared_ptr<const Representation>;

struct Intertwiner {
  RepPtr source, target;
  Matrix matrix;  // target.dim x source.dim
};

namespace detail {

inline std::optional<std::vector<long>> diagonal_weights(const FieldPtr& ctx,
                                                         const Matrix& k) {
  const long r = ctx->r();
  std::vector<CycScalar> qpow;
  for (long w = 0; w < r; ++w) qpow.push_back(ctx->q_pow(w));
  std::vector<long> out(k.rows(), 0);
  for (std::size_t i = 0; i < k.rows(); ++i) {
    for (std::size_t j = 0; j < k.cols(); ++j)
      if (i != j && !k.at(i, j).is_zero()) return std::nullopt;
    long found = -1;
    for (long w = 0; w < r; ++w)
      if (k.at(i, i) == qpow[w]) { found = w; break; }
    if (found < 0) return std::nullopt;
    out[i] = found;
  }
  return out;
}

inline void check_relations(const FieldPtr& ctx, const Matrix& k, const Matrix& e,
                            const Matrix& f) {
  const long r = ctx->r();
  const std::size_t n = k.rows();
  Matrix id = Matrix::identity(ctx, n);
  Matrix kp = id, ep = id, fp = id;
  for (long j = 0; j < r; ++j) { kp = kp * k; ep = ep * e; fp = fp * f; }
  if (kp != id || !ep.is_zero() || !fp.is_zero())
    throw std::logic_error("representation: K^r/E^r/F^r relation fails");
  Matrix kinv = k.inverse();
  if (k * e * kinv != e.scaled(ctx->q_pow(2)) ||
      k * f * kinv != f.scaled(ctx->q_pow(-2)))
    throw std::logic_error("representation: K conjugation relation fails");
  Matrix comm = e * f - f * e;
  if (comm != (k - kinv).scaled(ctx->qbrace(1).inverse()))
    throw std::logic_error("representation: [E,F] relation fails");
}

inline RepPtr make_rep(const FieldPtr& ctx, std::string label, Matrix k, Matrix e,
                       Matrix f) {
  check_relations(ctx, k, e, f);
  auto rep = std::make_shared<Representation>();
  rep->ctx = ctx;
  rep->label = std::move(label);
  rep->dim = k.rows();
  rep->weights = diagonal_weights(ctx, k);
  rep->actK = std::move(k);
  rep->actE = std::move(e);
  rep->actF = std::move(f);
  return rep;
}

}  // namespace detail

/// V_n, the simple module of dimension n+1 (0 <= n <= r-1).
inline RepPtr simple_module(const AlgebraPtr& alg, long n) {
  const FieldPtr& ctx = alg->ctx();
  if (n < 0 || n > alg->r() - 1)
    throw std::invalid_argument("simple_module: n out of range");
  const std::size_t d = std::size_t(n) + 1;
  Matrix k(ctx, d, d), e(ctx, d, d), f(ctx, d, d);
  for (long i = 0; i <= n; ++i) {
    k.at(i, i) = ctx->q_pow(n - 2 * i);
    if (i > 0) e.at(i - 1, i) = ctx->qint(i) * ctx->qint(n - i + 1);
    if (i < n) f.at(i + 1, i) = ctx->one();
  }
  return detail::make_rep(ctx, "V" + std::to_string(n), std::move(k), std::move(e),
                          std::move(f));
}

/// P_n, the projective cover of V_n, of dimension 2r (0 <= n <= r-2). Basis
/// order: a_0..a_n, x_0..x_{r-n-2}, y_0..y_{r-n-2}, b_0..b_n.
inline RepPtr projective_module(const AlgebraPtr& alg, long n) {
  const FieldPtr& ctx = alg->ctx();
  const long r = alg->r();
  if (n < 0 || n > r - 2)
    throw std::invalid_argument("projective_module: n out of range");
  const long m = r - n - 2;  // top index of x_j, y_j
  const std::size_t d = std::size_t(2 * r);
  auto A = [&](long i) { return std::size_t(i); };
  auto X = [&](long j) { return std::size_t(n + 1 + j); };
  auto Y = [&](long j) { return std::size_t(n + 2 + m + j); };
  auto B = [&](long i) { return std::size_t(n + 3 + 2 * m + i); };
  Matrix k(ctx, d, d), e(ctx, d, d), f(ctx, d, d);
  for (long i = 0; i <= n; ++i) {
    k.at(A(i), A(i)) = ctx->q_pow(n - 2 * i);
    if (i > 0) e.at(A(i - 1), A(i)) = ctx->qint(i) * ctx->qint(n - i + 1);
    if (i < n) f.at(A(i + 1), A(i)) = ctx->one();
  }
  for (long j = 0; j <= m; ++j) {
    k.at(X(j), X(j)) = ctx->q_pow(-n - 2 * j - 2);
    if (j > 0) e.at(X(j - 1), X(j)) = -(ctx->qint(j) * ctx->qint(n + j + 1));
    if (j < m) f.at(X(j + 1), X(j)) = ctx->one();
    else f.at(A(0), X(j)) = ctx->one();
  }
  for (long j = 0; j <= m; ++j) {
    k.at(Y(j), Y(j)) = ctx->q_pow(-n - 2 * j - 2);
    if (j == 0) e.at(A(n), Y(j)) = ctx->one();
    else e.at(Y(j - 1), Y(j)) = -(ctx->qint(j) * ctx->qint(n + j + 1));
    if (j < m) f.at(Y(j + 1), Y(j)) = ctx->one();
  }
  for (long i = 0; i <= n; ++i) {
    k.at(B(i), B(i)) = ctx->q_pow(n - 2 * i);
    if (i == 0) e.at(X(m), B(i)) = ctx->one();
    else {
      e.at(A(i - 1), B(i)) = ctx->one();
      e.at(B(i - 1), B(i)) = ctx->qint(i) * ctx->qint(n - i + 1);
    }
    if (i < n) f.at(B(i + 1), B(i)) = ctx->one();
    else f.at(Y(0), B(i)) = ctx->one();
  }
  return detail::make_rep(ctx, "P" + std::to_string(n), std::move(k), std::move(e),
                          std::move(f));
}

/// A (x) B with the generator coproducts.
inline RepPtr tensor(const AlgebraPtr& alg, const RepPtr& a, const RepPtr& b) {
  const FieldPtr& ctx = alg->ctx();
  Matrix ia = Matrix::identity(ctx, a->dim), ib = Matrix::identity(ctx, b->dim);
  Matrix k = a->actK.kron(b->actK);
  Matrix e = a->actE.kron(b->actK) + ia.kron(b->actE);
  Matrix f = a->actK.inverse().kron(b->actF) + a->actF.kron(ib);
  return detail::make_rep(ctx, a->label + "(x)" + b->label, std::move(k),
                          std::move(e), std::move(f));
}

/// Dual module: x acts on A* as the transpose of S(x) on A.
inline RepPtr dual(const AlgebraPtr& alg, const RepPtr& a) {
  const FieldPtr& ctx = alg->ctx();
  Matrix kinv = a->actK.inverse();
  Matrix k = kinv.transpose();
  Matrix e = (a->actE * kinv).scaled(-ctx->one()).transpose();   // S(E) = -E K^{-1}
  Matrix f = (a->actK * a->actF).scaled(-ctx->one()).transpose(); // S(F) = -K F
  return detail::make_rep(ctx, a->label + "*", std::move(k), std::move(e),
                          std::move(f));
}

/// Matrix of a general algebra element on a module.
inline Matrix rep_action(const AlgebraPtr& alg, const RepPtr& rep, const AlgElem& x) {
  const FieldPtr& ctx = alg->ctx();
  const long r = alg->r();
  // cached powers of the generator actions
  std::vector<Matrix> ep{Matrix::identity(ctx, rep->dim)}, fp = ep, kp = ep;
  for (long j = 1; j < r; ++j) {
    ep.push_back(ep.back() * rep->actE);
    fp.push_back(fp.back() * rep->actF);
    kp.push_back(kp.back() * rep->actK);
  }
  Matrix out(ctx, rep->dim, rep->dim);
  for (const auto& [m, c] : x.terms()) {
    long a = PbwIndex::a(r, m), b = PbwIndex::b(r, m), cc = PbwIndex::c(r, m);
    out = out + (ep[a] * fp[b] * kp[cc]).scaled(c);
  }
  return out;
}

/// Basis of the space of intertwiners A -> B, as (B.dim x A.dim) matrices.
/// When both modules are K-diagonal, unknowns are pruned to weight-matching
/// entry positions before solving.
inline std::vector<Intertwiner> hom_space(const RepPtr& a, const RepPtr& b) {
  const FieldPtr& ctx = a->ctx;
  const long r = ctx->r();
  const std::size_t da = a->dim, db = b->dim;
  // unknown positions (i, j) for T[i][j]
  std::vector<std::pair<std::size_t, std::size_t>> pos;
  const bool pruned = a->weights && b->weights;
  for (std::size_t i = 0; i < db; ++i)
    for (std::size_t j = 0; j < da; ++j)
      if (!pruned ||
          ((*b->weights)[i] - (*a->weights)[j]) % r == 0)
        pos.emplace_back(i, j);
  std::vector<std::ptrdiff_t> pos_index(db * da, -1);
  for (std::size_t u = 0; u < pos.size(); ++u)
    pos_index[pos[u].first * da + pos[u].second] = std::ptrdiff_t(u);

  std::vector<const Matrix*> gens;
  if (!pruned) gens.push_back(&a->actK);  // K constraint subsumed by pruning otherwise
  gens.push_back(&a->actE);
  gens.push_back(&a->actF);
  const Matrix* bgens[3] = {&b->actK, &b->actE, &b->actF};
  std::size_t goff = pruned ? 1 : 0;

  Matrix sys(ctx, gens.size() * db * da, pos.size());
  std::size_t row = 0;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const Matrix& ga = *gens[g];
    const Matrix& gb = *bgens[g + goff];
    // constraint: sum_k T[i][k] ga[k][j] - gb[i][k] T[k][j] = 0
    for (std::size_t i = 0; i < db; ++i)
      for (std::size_t j = 0; j < da; ++j, ++row) {
        for (std::size_t k = 0; k < da; ++k) {
          auto u = pos_index[i * da + k];
          if (u >= 0 && !ga.at(k, j).is_zero()) sys.at(row, u) += ga.at(k, j);
        }
        for (std::size_t k = 0; k < db; ++k) {
          auto u = pos_index[k * da + j];
          if (u >= 0 && !gb.at(i, k).is_zero()) sys.at(row, u) -= gb.at(i, k);
        }
      }
  }
  std::vector<Intertwiner> out;
  for (const auto& v : sys.kernel()) {
    Matrix t(ctx, db, da);
    for (std::size_t u = 0; u < pos.size(); ++u)
      t.at(pos[u].first, pos[u].second) = v[u];
    out.push_back(Intertwiner{a, b, std::move(t)});
  }
  return out;
}

/// True when some (deterministically searched) combination of intertwiners is
/// invertible.
inline bool is_isomorphic(const RepPtr& a, const RepPtr& b) {
  if (a->dim != b->dim) return false;
  auto homs = hom_space(a, b);
  for (const auto& h : homs)
    if (!h.matrix.determinant().is_zero()) return true;
  // deterministic integer combinations of the basis
  if (homs.size() > 1) {
    Matrix acc = homs[0].matrix;
    for (std::size_t k = 1; k < homs.size(); ++k) {
      acc = acc + homs[k].matrix.scaled(a->ctx->from_int(long(k) + 2));
      if (!acc.determinant().is_zero()) return true;
    }
  }
  return false;
}

namespace detail {

/// Solve B X = Y for X, with B of full column rank.
inline Matrix solve_full_rank(const Matrix& b, const Matrix& y) {
  const FieldPtr& ctx = b.ctx();
  Matrix aug(ctx, b.rows(), b.cols() + y.cols());
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) aug.at(i, j) = b.at(i, j);
    for (std::size_t j = 0; j < y.cols(); ++j) aug.at(i, b.cols() + j) = y.at(i, j);
  }
  auto pivots = aug.echelonize();
  if (pivots.size() < b.cols())
    throw std::logic_error("solve_full_rank: rank deficient");
  for (std::size_t k = 0; k < b.cols(); ++k)
    if (pivots[k] != k) throw std::logic_error("solve_full_rank: inconsistent system");
  Matrix x(ctx, b.cols(), y.cols());
  for (std::size_t i = 0; i < b.cols(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) x.at(i, j) = aug.at(i, b.cols() + j);
  return x;
}

/// Restrict the module structure of `rep` to the image of projector `p`
/// (which commutes with the action).
inline RepPtr image_module(const RepPtr& rep, const Matrix& p, const std::string& label) {
  const FieldPtr& ctx = rep->ctx;
  // greedy independent columns of p; each column is a weight vector when actK
  // is diagonal, so the restricted actK stays diagonal
  Matrix work = p;
  auto piv = work.echelonize();
  Matrix basis(ctx, rep->dim, piv.size());
  for (std::size_t k = 0; k < piv.size(); ++k)
    for (std::size_t i = 0; i < rep->dim; ++i) basis.at(i, k) = p.at(i, piv[k]);
  Matrix k = solve_full_rank(basis, rep->actK * basis);
  Matrix e = solve_full_rank(basis, rep->actE * basis);
  Matrix f = solve_full_rank(basis, rep->actF * basis);
  return make_rep(ctx, label, std::move(k), std::move(e), std::move(f));
}

}  // namespace detail

/// Greedy Krull-Schmidt decomposition against the catalogue
/// {V_0..V_{r-1}, P_0..P_{r-2}}, scanned in that fixed order. Returns the
/// multiset of summand labels; throws if the dimensions do not exhaust.
inline std::vector<std::string> decompose(const AlgebraPtr& alg, RepPtr a) {
  const long r = alg->r();
  std::vector<RepPtr> catalogue;
  for (long n = 0; n < r; ++n) catalogue.push_back(simple_module(alg, n));
  for (long n = 0; n <= r - 2; ++n) catalogue.push_back(projective_module(alg, n));
  std::vector<std::string> out;
  for (const RepPtr& c : catalogue) {
    for (;;) {
      if (a->dim == 0) break;
      if (a->dim < c->dim) break;
      auto in = hom_space(c, a);
      auto pr = hom_space(a, c);
      bool split = false;
      for (const auto& iota : in) {
        for (const auto& pi : pr) {
          Matrix comp = pi.matrix * iota.matrix;  // c -> c
          if (comp.determinant().is_zero()) continue;
          out.push_back(c->label);
          if (a->dim == c->dim) {
            a = std::make_shared<Representation>();  // exhausted
          } else {
            Matrix e = iota.matrix * comp.inverse() * pi.matrix;  // idempotent on a
            Matrix compl_p = Matrix::identity(alg->ctx(), a->dim) - e;
            a = detail::image_module(a, compl_p, "rest");
          }
          split = true;
          break;
        }
        if (split) break;
      }
      if (!split) break;
    }
    if (a->dim == 0) break;
  }
  if (a->dim != 0) throw std::logic_error("decompose: catalogue does not exhaust");
  return out;
}

/// Categorical dimension: trace of the pivotal action.
inline CycScalar qdim(const RepPtr& a) { return (a->actK).trace(); }

/// Categorical trace of an endomorphism.
inline CycScalar qtrace(const Intertwiner& f) {
  if (f.source->dim != f.target->dim)
    throw std::invalid_argument("qtrace: not an endomorphism");
  return (f.source->actK * f.matrix).trace();
}
inline CycScalar qtrace(const RepPtr& a, const Matrix& f) {
  return (a->actK * f).trace();
}

/// The adjoint representation on the r^3-dimensional underlying space of the
/// algebra, ad_x(y) = x_(1) y S(x_(2)).
inline RepPtr adjoint_rep(const AlgebraPtr& alg) {
  const FieldPtr& ctx = alg->ctx();
  const long r = alg->r();
  const std::size_t d = std::size_t(r * r * r);
  Matrix k(ctx, d, d), e(ctx, d, d), f(ctx, d, d);
  for (std::size_t j = 0; j < d; ++j) {
    AlgElem y = alg->pbw(long(j));
    AlgElem ke = alg->adjoint_action(alg->K(1), y);
    AlgElem ee = alg->adjoint_action(alg->E(), y);
    AlgElem fe = alg->adjoint_action(alg->F(), y);
    for (const auto& [m, c] : ke.terms()) k.at(std::size_t(m), j) = c;
    for (const auto& [m, c] : ee.terms()) e.at(std::size_t(m), j) = c;
    for (const auto& [m, c] : fe.terms()) f.at(std::size_t(m), j) = c;
  }
  return detail::make_rep(ctx, "ad", std::move(k), std::move(e), std::move(f));
}

/// The regular representation (left multiplication on the algebra).
inline RepPtr regular_rep(const AlgebraPtr& alg) {
  const FieldPtr& ctx = alg->ctx();
  const long r = alg->r();
  const std::size_t d = std::size_t(r * r * r);
  Matrix k(ctx, d, d), e(ctx, d, d), f(ctx, d, d);
  for (std::size_t j = 0; j < d; ++j) {
    AlgElem y = alg->pbw(long(j));
    AlgElem ky = alg->multiply(alg->K(1), y);
    AlgElem ey = alg->multiply(alg->E(), y);
    AlgElem fy = alg->multiply(alg->F(), y);
    for (const auto& [m, c] : ky.terms()) k.at(std::size_t(m), j) = c;
    for (const auto& [m, c] : ey.terms()) e.at(std::size_t(m), j) = c;
    for (const auto& [m, c] : fy.terms()) f.at(std::size_t(m), j) = c;
  }
  return detail::make_rep(ctx, "reg", std::move(k), std::move(e), std::move(f));
}

/// Structure morphism j_X : ad -> X (x) X*, j_X(x) = sum_a (x v_a) (x) phi^a.
/// Column m is the row-major flattening of the action matrix of the m-th PBW
/// basis element on X.
inline Matrix end_structure_j(const AlgebraPtr& alg, const RepPtr& x) {
  const FieldPtr& ctx = alg->ctx();
  const long r = alg->r();
  const std::size_t d = std::size_t(r * r * r);
  Matrix out(ctx, x->dim * x->dim, d);
  for (std::size_t m = 0; m < d; ++m) {
    Matrix act = rep_action(alg, x, alg->pbw(long(m)));
    for (std::size_t i = 0; i < x->dim; ++i)
      for (std::size_t a = 0; a < x->dim; ++a)
        out.at(i * x->dim + a, m) = act.at(i, a);
  }
  return out;
}

}  // namespace qtop
