#pragma once

// The semisimplified category: negligible quotients, S-matrix, Kirby color,
// the surgery invariant of closed 3-manifolds with embedded blue graphs, and
// state-space dimensions from triangular labelings of trivalent graphs.

#include <array>

#include "qtop/tangle.hpp"

namespace qtop {

/// Indices of the even simples that survive semisimplification.
inline std::vector<long> simple_index_set(long r) {
  std::vector<long> out;
  for (long i = 0; i + 3 <= r; i += 2) out.push_back(i);
  return out;
}

struct KirbyColor {
  std::vector<long> indices;
  std::vector<CycScalar> weights;  // [i+1] for each index
};

inline KirbyColor kirby_color(const AlgebraPtr& alg) {
  KirbyColor k;
  k.indices = simple_index_set(alg->r());
  for (long i : k.indices) k.weights.push_back(alg->ctx()->qint(i + 1));
  return k;
}

struct Normalization {
  CycScalar delta_plus, delta_minus;  // Kirby-colored +-1 framed unknots
  CycScalar dcal;                     // global normalization, dcal^2 = d+ d-
  CycScalar delta;                    // framing anomaly, delta = d+/dcal
};

namespace detail {

inline CycScalar power_int(const CycScalar& x, long e) {
  if (e >= 0) return x.pow(e);
  CycScalar one = x / x;
  return (one / x).pow(-e);
}

/// Recolors every red strand of `d` blue, component by component; colors are
/// indexed in the linking-matrix component order (smallest port first).
/// Each component is oriented by its traversal: ports passed downward carry
/// the dual label, and cap/cup flavors are chosen to match, so the result is
/// a valid all-blue diagram.
inline Diagram recolor_red(const Diagram& d, const std::vector<Label>& colors) {
  auto w = build_wiring(d);
  std::map<long, long> red_index;
  for (const auto& port : w.ports) {
    if (!w.boundaries[port.first][port.second].is_red()) continue;
    long c = w.port_component.at(port);
    if (!red_index.count(c)) {
      long k = long(red_index.size());
      red_index[c] = k;
    }
  }
  if (red_index.size() != colors.size())
    throw std::invalid_argument("recolor: wrong number of colors");

  // traversal direction at every red port
  std::map<std::pair<std::size_t, std::size_t>, bool> port_up;
  {
    std::set<long> seen;
    for (const auto& port : w.ports) {
      if (!w.boundaries[port.first][port.second].is_red()) continue;
      if (!seen.insert(w.port_component.at(port)).second) continue;
      auto p = port;
      bool up = true;
      do {
        port_up[p] = up;
        const auto& adj = w.at_port.at(p);
        long arc_idx = -1;
        int entry = -1;
        for (auto ai : adj) {
          const Arc& a = w.arcs[ai];
          if (a.b0 == p.first && a.p0 == p.second && a.in0 == up) {
            arc_idx = long(ai); entry = 0;
          } else if (a.b1 == p.first && a.p1 == p.second && a.in1 == up) {
            arc_idx = long(ai); entry = 1;
          }
        }
        if (arc_idx < 0)
          throw std::invalid_argument("recolor: open red strand");
        const Arc& a = w.arcs[std::size_t(arc_idx)];
        int exit = 1 - entry;
        bool exit_in = exit == 0 ? a.in0 : a.in1;
        p = exit == 0 ? std::make_pair(a.b0, a.p0) : std::make_pair(a.b1, a.p1);
        up = !exit_in;
      } while (!(p == port && up));
    }
  }
  auto label_at = [&](std::size_t b, std::size_t p) {
    const Label& c = colors[red_index.at(w.port_component.at({b, p}))];
    return port_up.at({b, p}) ? c : Label::dual_of(c);
  };
  auto color_of = [&](std::size_t b, std::size_t p) -> const Label& {
    return colors[red_index.at(w.port_component.at({b, p}))];
  };

  Diagram out = d;
  for (std::size_t s = 0; s < d.slices.size(); ++s) {
    std::size_t in_pos = 0, out_pos = 0;
    for (std::size_t gi = 0; gi < d.slices[s].size(); ++gi) {
      const Generator& g = d.slices[s][gi];
      Generator& og = out.slices[s][gi];
      switch (g.type) {
        case Generator::Type::Id:
        case Generator::Type::TwPos:
        case Generator::Type::TwNeg:
          if (g.a.is_red()) og.a = label_at(s, in_pos);
          break;
        case Generator::Type::Lev:
        case Generator::Type::Rev:
          if (g.a.is_red()) {
            // rev eats [C, C*], lev eats [C*, C]: pick by the left passage
            og.type = port_up.at({s, in_pos}) ? Generator::Type::Rev
                                              : Generator::Type::Lev;
            og.a = color_of(s, in_pos);
          }
          break;
        case Generator::Type::Lcoev:
        case Generator::Type::Rcoev:
          if (g.a.is_red()) {
            // lcoev emits [C, C*], rcoev emits [C*, C]
            og.type = port_up.at({s + 1, out_pos}) ? Generator::Type::Lcoev
                                                   : Generator::Type::Rcoev;
            og.a = color_of(s + 1, out_pos);
          }
          break;
        case Generator::Type::XPos:
        case Generator::Type::XNeg:
          if (g.a.is_red()) og.a = label_at(s, in_pos);
          if (g.b.is_red()) og.b = label_at(s, in_pos + 1);
          break;
        case Generator::Type::Coupon:
          break;
      }
      in_pos += g.inputs(d.coupons).size();
      out_pos += g.outputs(d.coupons).size();
    }
  }
  return out;
}

}  // namespace detail

/// The stabilization scalars of the semisimplified theory.  The expansions of
/// the Kirby-colored framed unknots are checked against the closed forms.
inline Normalization ss_normalization(const AlgebraPtr& alg) {
  const FieldPtr& ctx = alg->ctx();
  const long r = alg->r();
  TangleEvaluator ev(alg);
  CycScalar dplus = ctx->zero(), dminus = ctx->zero();
  for (long i : simple_index_set(r)) {
    std::string l = "V" + std::to_string(i);
    auto dp = parse_diagram("lcoev(" + l + "); tw+(" + l + "), id(" + l +
                            "*); rev(" + l + ")");
    auto dm = parse_diagram("lcoev(" + l + "); tw-(" + l + "), id(" + l +
                            "*); rev(" + l + ")");
    CycScalar w = ctx->qint(i + 1);
    dplus += w * ev.evaluate_blue(dp).at(0, 0);
    dminus += w * ev.evaluate_blue(dm).at(0, 0);
  }
  Normalization n;
  n.delta_plus = dplus;
  n.delta_minus = dminus;
  CycScalar brace1 = ctx->qbrace(1);
  // closed forms of the two Kirby expansions (Gauss sums)
  CycScalar closed_minus =
      ctx->i_pow((r - 1) / 2) * ctx->sqrt_r() * ctx->q_pow((r + 3) / 2) / brace1;
  CycScalar closed_plus =
      -(ctx->i_pow(-(r - 1) / 2) * ctx->sqrt_r() * ctx->q_pow((r - 3) / 2)) /
      brace1;
  if (dminus != closed_minus || dplus != closed_plus)
    throw std::logic_error("stabilization scalars disagree with closed forms");
  // the square root of d+ d- whose anomaly d+/dcal is i^{-(r+1)/2} q^{(r-3)/2}
  n.dcal = -(ctx->imag_unit() * ctx->sqrt_r()) / brace1;
  n.delta = ctx->i_pow(-(r + 1) / 2) * ctx->q_pow((r - 3) / 2);
  if (n.dcal * n.dcal != n.delta_plus * n.delta_minus)
    throw std::logic_error("normalization: dcal^2 != d+ d-");
  if (n.delta * n.delta_minus != n.dcal)
    throw std::logic_error("normalization: delta d- != dcal");
  if (n.delta * n.dcal != n.delta_plus)
    throw std::logic_error("normalization: delta dcal != d+");
  return n;
}

/// S-matrix on the surviving simples, entry (a,b) for colors (2a, 2b).
/// Computed by the closed formula and cross-checked against the Hopf-link
/// diagram evaluation.
inline Matrix smatrix(const AlgebraPtr& alg) {
  const FieldPtr& ctx = alg->ctx();
  auto idx = simple_index_set(alg->r());
  const std::size_t n = idx.size();
  TangleEvaluator ev(alg);
  Matrix s(ctx, n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      s.at(a, b) = ctx->qint((idx[a] + 1) * (idx[b] + 1));
      std::string la = "V" + std::to_string(idx[a]);
      std::string lb = "V" + std::to_string(idx[b]);
      auto hopf = parse_diagram(
          "lcoev(" + la + ");"
          "id(" + la + "), lcoev(" + lb + "), id(" + la + "*);"
          "x+(" + la + "," + lb + "), id(" + lb + "*), id(" + la + "*);"
          "x+(" + lb + "," + la + "), id(" + lb + "*), id(" + la + "*);"
          "id(" + la + "), rev(" + lb + "), id(" + la + "*);"
          "rev(" + la + ")");
      if (ev.evaluate_blue(hopf).at(0, 0) != s.at(a, b))
        throw std::logic_error("smatrix: Hopf evaluation disagrees with formula");
    }
  return s;
}

/// Dimension of the hom space in the negligible quotient: the rank of the
/// trace pairing (g, f) -> qtrace(g o f) on hom(A,B) x hom(B,A).
inline std::size_t negligible_quotient_dim(const AlgebraPtr& alg,
                                           const RepPtr& a, const RepPtr& b) {
  auto ab = hom_space(a, b);
  auto ba = hom_space(b, a);
  if (ab.empty() || ba.empty()) return 0;
  Matrix p(alg->ctx(), ab.size(), ba.size());
  for (std::size_t k = 0; k < ab.size(); ++k)
    for (std::size_t l = 0; l < ba.size(); ++l)
      p.at(k, l) = qtrace(a, ba[l].matrix * ab[k].matrix);
  return p.rank();
}

/// Surgery invariant of the closed 3-manifold presented by the red components
/// of `d`, containing the blue part of `d` as an embedded graph.  Red
/// components are expanded multilinearly over the Kirby color.
inline CycScalar rt_invariant(const AlgebraPtr& alg, const Diagram& d) {
  if (!d.is_closed()) throw std::invalid_argument("open components");
  const FieldPtr& ctx = alg->ctx();
  TangleEvaluator ev(alg);
  SurgeryData sd = ev.linking_matrix(d);
  const std::size_t ell = sd.components;
  KirbyColor omega = kirby_color(alg);
  const std::size_t m = omega.indices.size();

  CycScalar total = ctx->zero();
  std::vector<std::size_t> pick(ell, 0);
  while (true) {
    std::vector<Label> colors;
    CycScalar weight = ctx->one();
    for (std::size_t c = 0; c < ell; ++c) {
      colors.push_back(Label::simple(omega.indices[pick[c]]));
      weight *= omega.weights[pick[c]];
    }
    Diagram blue = detail::recolor_red(d, colors);
    total += weight * ev.evaluate_blue(blue).at(0, 0);
    std::size_t c = 0;
    for (; c < ell; ++c) {
      if (++pick[c] < m) break;
      pick[c] = 0;
    }
    if (c == ell) break;
  }

  Normalization n = ss_normalization(alg);
  return detail::power_int(n.dcal, -1 - long(ell)) *
         detail::power_int(n.delta, -sd.signature) * total;
}

/// Number of labelings of a trivalent graph (given as vertex triples of edge
/// ids) by surviving simples subject to the triangle and degree bounds.
inline long triangular_labelings(long r,
                                 const std::vector<std::array<long, 3>>& vertices,
                                 long num_edges) {
  auto idx = simple_index_set(r);
  const long m = long(idx.size());
  auto admissible = [&](long a, long b, long c) {
    return c >= std::abs(a - b) && c <= a + b && a + b + c < 2 * r - 2;
  };
  std::vector<long> pick(num_edges, 0);
  long count = 0;
  while (true) {
    bool ok = true;
    for (const auto& v : vertices) {
      long a = idx[pick[v[0]]], b = idx[pick[v[1]]], c = idx[pick[v[2]]];
      if (!admissible(a, b, c)) { ok = false; break; }
    }
    if (ok) ++count;
    long e = 0;
    for (; e < num_edges; ++e) {
      if (++pick[e] < m) break;
      pick[e] = 0;
    }
    if (e == num_edges) break;
  }
  return count;
}

/// Caterpillar trivalent graph of genus g: end loops attached directly to the
/// ends of a path, middle loops hanging off the path by stems.
inline std::vector<std::array<long, 3>> caterpillar_graph(long g) {
  // edge ids: loops 0..g-1, path segments g..2g-2, stems 2g-1..3g-4
  std::vector<std::array<long, 3>> v;
  v.push_back({0, 0, g});                  // left end
  v.push_back({g - 1, g - 1, 2 * g - 2});  // right end
  for (long j = 1; j + 1 <= g - 1; ++j) {
    long stem = 2 * g - 2 + j;
    v.push_back({j, j, stem});               // loop base
    v.push_back({g + j - 1, g + j, stem});   // path junction
  }
  return v;
}

/// State-space dimension of the genus-g surface.
inline long verlinde_dim(long r, long g) {
  if (g < 0) throw std::invalid_argument("negative genus");
  if (g == 0) return 1;
  if (g == 1) return long(simple_index_set(r).size());
  return triangular_labelings(r, caterpillar_graph(g), 3 * g - 3);
}

}  // namespace qtop
