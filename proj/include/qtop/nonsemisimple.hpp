// Renormalized theory: modified trace on projectives, the unrenormalized
// bead invariant of closed 3-manifolds, the renormalized invariant of
// admissible decorated pairs, and genus-one dimension counts.
#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtop/semisimple.hpp"

namespace qtop {

// ---------------------------------------------------------------------------
// modified trace

/// Right partial trace over the second tensor factor, with the pivot
/// inserted: tr_q(f on P(x)X) = tr_q(ptrace_right(f) on P).
inline Matrix partial_trace_right(const RepPtr& p, const RepPtr& x,
                                  const Matrix& f) {
  const FieldPtr& ctx = p->ctx;
  const std::size_t dp = p->dim, dx = x->dim;
  if (f.rows() != dp * dx || f.cols() != dp * dx)
    throw std::invalid_argument("partial trace: dimension mismatch");
  Matrix out(ctx, dp, dp);
  for (std::size_t i = 0; i < dp; ++i)
    for (std::size_t j = 0; j < dp; ++j) {
      CycScalar acc = ctx->zero();
      for (std::size_t a = 0; a < dx; ++a)
        for (std::size_t y = 0; y < dx; ++y) {
          const CycScalar& k = x->actK.at(a, y);
          if (k.is_zero()) continue;
          acc += k * f.at(i * dx + y, j * dx + a);
        }
      out.at(i, j) = acc;
    }
  return out;
}

namespace detail {

/// Per-indecomposable trace data. Endomorphism rings of the catalogue
/// projectives are spanned by the identity and (for the P_n) one nilpotent;
/// the trace value on the nilpotent is pinned by the partial-trace and
/// cyclicity axioms rather than tabulated.
struct TraceTable {
  std::vector<RepPtr> catalogue;     // [0] = V_{r-1}, [1+n] = P_n
  std::vector<Matrix> nil;           // chosen nilpotent endo; unused at [0]
  std::vector<CycScalar> id_value;   // t(id)
  std::vector<CycScalar> nil_value;  // t(nil), solved once per r
};

/// Trace of `f` as an affine expression in the unknown nilpotent values:
/// c0 + sum coeff[k] * t(nil_k). Splits `p` greedily against the catalogue.
struct TraceExpr {
  CycScalar c0;
  std::vector<CycScalar> coeff;
};

inline TraceExpr trace_expr(const AlgebraPtr& alg, const TraceTable& tab,
                            const RepPtr& p, const Matrix& f) {
  const FieldPtr& ctx = alg->ctx();
  if (f.rows() != p->dim || f.cols() != p->dim)
    throw std::invalid_argument("modified trace: not an endomorphism");

  TraceExpr out{ctx->zero(),
                std::vector<CycScalar>(tab.catalogue.size(), ctx->zero())};
  RepPtr rest = p;
  // inclusion of the running remainder into p, and the matching projection
  Matrix u = Matrix::identity(ctx, p->dim);
  Matrix w = Matrix::identity(ctx, p->dim);

  for (std::size_t k = 0; k < tab.catalogue.size(); ++k) {
    const RepPtr& c = tab.catalogue[k];
    for (;;) {
      if (rest->dim == 0 || rest->dim < c->dim) break;
      auto in = hom_space(c, rest);
      auto pr = hom_space(rest, c);
      bool split = false;
      for (const auto& iota : in) {
        for (const auto& pi : pr) {
          Matrix comp = pi.matrix * iota.matrix;
          if (comp.determinant().is_zero()) continue;
          Matrix proj = comp.inverse() * pi.matrix;  // proj * iota = id_c
          Matrix block = (proj * w) * f * (u * iota.matrix);
          CycScalar scal = block.trace() / ctx->from_int(long(c->dim));
          out.c0 += scal * tab.id_value[k];
          Matrix resid = block - Matrix::identity(ctx, c->dim).scaled(scal);
          if (!resid.is_zero()) {
            if (k == 0)
              throw std::logic_error("trace: non-scalar block on a simple");
            const Matrix& x = tab.nil[k];
            CycScalar d = ctx->zero();
            bool found = false;
            for (std::size_t i = 0; i < x.rows() && !found; ++i)
              for (std::size_t j = 0; j < x.cols() && !found; ++j)
                if (!x.at(i, j).is_zero()) {
                  d = resid.at(i, j) / x.at(i, j);
                  found = true;
                }
            if (resid != x.scaled(d))
              throw std::logic_error("trace: block outside the local ring");
            out.coeff[k] += d;
          }
          if (rest->dim == c->dim) {
            rest = std::make_shared<Representation>();
          } else {
            Matrix e = iota.matrix * proj;
            Matrix pc = Matrix::identity(ctx, rest->dim) - e;
            Matrix work = pc;
            auto piv = work.echelonize();
            Matrix basis(ctx, rest->dim, piv.size());
            for (std::size_t kk = 0; kk < piv.size(); ++kk)
              for (std::size_t i = 0; i < rest->dim; ++i)
                basis.at(i, kk) = pc.at(i, piv[kk]);
            Matrix xmat = detail::solve_full_rank(basis, pc);
            rest = detail::image_module(rest, pc, "rest");
            u = u * basis;
            w = xmat * w;
          }
          split = true;
          break;
        }
        if (split) break;
      }
      if (!split) break;
    }
    if (rest->dim == 0) break;
  }
  if (rest->dim != 0)
    throw std::invalid_argument("modified trace: module is not projective");
  return out;
}

/// Builds and caches the trace table for a given root order, solving for the
/// nilpotent values from the partial-trace axiom (tensoring with V_1) and
/// cyclicity between catalogue members.
inline const TraceTable& trace_table(const AlgebraPtr& alg) {
  static std::map<long, TraceTable> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto hit = cache.find(alg->r());
  if (hit != cache.end()) return hit->second;

  const FieldPtr& ctx = alg->ctx();
  const long r = alg->r();
  TraceTable tab;
  tab.catalogue.push_back(simple_module(alg, r - 1));
  tab.nil.emplace_back(ctx, 0, 0);
  tab.id_value.push_back(ctx->one());
  for (long n = 0; n <= r - 2; ++n) {
    RepPtr pn = projective_module(alg, n);
    tab.catalogue.push_back(pn);
    tab.id_value.push_back(ctx->qbrace_prime(n + 1));
    Matrix x(ctx, 0, 0);
    for (const auto& h : hom_space(pn, pn)) {
      CycScalar scal = h.matrix.trace() / ctx->from_int(long(pn->dim));
      Matrix resid =
          h.matrix - Matrix::identity(ctx, pn->dim).scaled(scal);
      if (!resid.is_zero()) {
        x = resid;
        break;
      }
    }
    if (x.rows() == 0) throw std::logic_error("trace: no nilpotent found");
    tab.nil.push_back(std::move(x));
  }
  tab.nil_value.assign(tab.catalogue.size(), ctx->zero());

  // axiom constraints, affine in the unknown nilpotent values
  std::vector<std::vector<CycScalar>> rows;
  std::vector<CycScalar> rhs;
  RepPtr v1 = simple_module(alg, 1);
  for (std::size_t k = 0; k < tab.catalogue.size(); ++k) {
    RepPtr a = tensor(alg, tab.catalogue[k], v1);
    for (const auto& fb : hom_space(a, a)) {
      TraceExpr le = trace_expr(alg, tab, a, fb.matrix);
      TraceExpr re = trace_expr(
          alg, tab, tab.catalogue[k],
          partial_trace_right(tab.catalogue[k], v1, fb.matrix));
      std::vector<CycScalar> row;
      for (std::size_t j = 0; j < tab.catalogue.size(); ++j)
        row.push_back(le.coeff[j] - re.coeff[j]);
      rows.push_back(std::move(row));
      rhs.push_back(re.c0 - le.c0);
    }
  }
  for (std::size_t k = 0; k < tab.catalogue.size(); ++k)
    for (std::size_t l = k + 1; l < tab.catalogue.size(); ++l) {
      auto fw = hom_space(tab.catalogue[k], tab.catalogue[l]);
      auto bw = hom_space(tab.catalogue[l], tab.catalogue[k]);
      for (const auto& f : fw)
        for (const auto& g : bw) {
          TraceExpr le = trace_expr(alg, tab, tab.catalogue[k],
                                    g.matrix * f.matrix);
          TraceExpr re = trace_expr(alg, tab, tab.catalogue[l],
                                    f.matrix * g.matrix);
          std::vector<CycScalar> row;
          for (std::size_t j = 0; j < tab.catalogue.size(); ++j)
            row.push_back(le.coeff[j] - re.coeff[j]);
          rows.push_back(std::move(row));
          rhs.push_back(re.c0 - le.c0);
        }
    }

  // solve for the P_n unknowns (catalogue indices 1..r-1)
  const std::size_t m = tab.catalogue.size() - 1;
  Matrix sys(ctx, rows.size(), m);
  Matrix b(ctx, rows.size(), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) sys.at(i, j) = rows[i][j + 1];
    b.at(i, 0) = rhs[i];
    if (!rows[i][0].is_zero())
      throw std::logic_error("trace: unexpected simple-summand unknown");
  }
  Matrix sol = detail::solve_full_rank(sys, b);
  for (std::size_t j = 0; j < m; ++j) tab.nil_value[j + 1] = sol.at(j, 0);

  return cache.emplace(r, std::move(tab)).first->second;
}

}  // namespace detail

/// Modified trace of the endomorphism `f` of the projective module `p`:
/// splits `p` into indecomposable projectives and evaluates each diagonal
/// block against the calibrated table (t(id_{P_n}) = {n+1}',
/// t(id_{V_{r-1}}) = 1, nilpotent values forced by the trace axioms).
inline CycScalar modified_trace(const AlgebraPtr& alg, const RepPtr& p,
                                const Matrix& f) {
  const detail::TraceTable& tab = detail::trace_table(alg);
  detail::TraceExpr e = detail::trace_expr(alg, tab, p, f);
  CycScalar total = e.c0;
  for (std::size_t k = 0; k < tab.catalogue.size(); ++k)
    total += e.coeff[k] * tab.nil_value[k];
  return total;
}

// ---------------------------------------------------------------------------
// normalization and surgery invariants

/// Stabilization data of the renormalized theory: the integral against the
/// (inverse) ribbon element, with the anomaly pair fixed accordingly.
inline Normalization nss_normalization(const AlgebraPtr& alg) {
  const FieldPtr& ctx = alg->ctx();
  const long r = alg->r();
  Normalization n;
  n.delta_minus = alg->integral_lambda(alg->ribbon());
  n.delta_plus = alg->integral_lambda(alg->ribbon_inv());
  CycScalar r32 = ctx->from_int(r) * ctx->sqrt_r();
  CycScalar closed_minus = ctx->i_pow((r - 1) / 2) * r32 * ctx->q_pow((r + 3) / 2);
  CycScalar closed_plus = ctx->i_pow(-(r - 1) / 2) * r32 * ctx->q_pow((r - 3) / 2);
  if (n.delta_minus != closed_minus || n.delta_plus != closed_plus)
    throw std::logic_error("stabilization scalars disagree with closed forms");
  n.dcal = r32;
  n.delta = ctx->i_pow(-(r - 1) / 2) * ctx->q_pow((r - 3) / 2);
  if (n.dcal * n.dcal != n.delta_plus * n.delta_minus)
    throw std::logic_error("normalization: dcal^2 != d+ d-");
  if (n.delta * n.delta_minus != n.dcal)
    throw std::logic_error("normalization: delta d- != dcal");
  if (n.delta * n.dcal != n.delta_plus)
    throw std::logic_error("normalization: delta dcal != d+");
  return n;
}

/// Unrenormalized invariant of the closed 3-manifold presented by an all-red
/// surgery diagram: the integral applied legwise to the universal beads.
inline CycScalar hennings_invariant(const AlgebraPtr& alg, const Diagram& d) {
  if (!d.is_closed()) throw std::invalid_argument("open components");
  {
    auto bounds = d.boundaries();
    for (const auto& b : bounds)
      for (const auto& l : b)
        if (!l.is_red())
          throw std::invalid_argument("surgery diagram must be all red");
  }
  const FieldPtr& ctx = alg->ctx();
  TangleEvaluator ev(alg);
  SurgeryData sd = ev.linking_matrix(d);
  TensorElem beads = ev.universal_beads(d);
  CycScalar acc = ctx->zero();
  for (const auto& [key, c] : beads.terms()) {
    CycScalar t = c;
    for (long m : key) t *= alg->integral_lambda(alg->pbw(m));
    acc += t;
  }
  Normalization n = nss_normalization(alg);
  return detail::power_int(n.dcal, -1 - long(sd.components)) *
         detail::power_int(n.delta, -sd.signature) * acc;
}

namespace detail {

/// True when the label names a projective module: a P_n, the top simple, a
/// dual of one, or a tensor word containing one.
inline bool label_projective(long r, const Label& l) {
  switch (l.kind) {
    case Label::Kind::Proj: return true;
    case Label::Kind::Simple: return l.n == r - 1;
    case Label::Kind::Dual: return label_projective(r, *l.left);
    case Label::Kind::Tensor:
      return label_projective(r, *l.left) || label_projective(r, *l.right);
    case Label::Kind::Red: return false;
  }
  return false;
}

}  // namespace detail

/// Renormalized invariant of the pair (surgered manifold, embedded blue
/// graph): modified trace of the cut endomorphism, normalized like the
/// surgery invariant. The blue graph must carry a projective label.
inline CycScalar renormalized_invariant(const AlgebraPtr& alg, const Diagram& d,
                                        const CutRef& cut) {
  if (!d.is_closed()) throw std::invalid_argument("open components");
  const long r = alg->r();
  auto bounds = d.boundaries();
  bool admissible = false;
  for (const auto& b : bounds)
    for (const auto& l : b)
      if (!l.is_red() && detail::label_projective(r, l)) admissible = true;
  if (!admissible)
    throw std::invalid_argument("inadmissible graph: no projective label");
  if (cut.boundary >= bounds.size() || cut.pos >= bounds[cut.boundary].size())
    throw std::invalid_argument("inadmissible cut: no such edge");
  TangleEvaluator ev(alg);
  Matrix endo = ev.evaluate_bichrome_cut(d, cut);
  RepPtr p = ev.resolve(bounds[cut.boundary][cut.pos]);
  SurgeryData sd = ev.linking_matrix(d);
  Normalization n = nss_normalization(alg);
  return detail::power_int(n.dcal, -1 - long(sd.components)) *
         detail::power_int(n.delta, -sd.signature) *
         modified_trace(alg, p, endo);
}

/// Evaluates the renormalized invariant at every valid cut edge and reports
/// whether all values agree (vacuously true with fewer than two cuts).
inline bool cutting_independence_check(const AlgebraPtr& alg, const Diagram& d) {
  const long r = alg->r();
  auto bounds = d.boundaries();
  std::vector<CutRef> cuts;
  for (std::size_t b = 0; b < bounds.size(); ++b)
    for (std::size_t p = 0; p < bounds[b].size(); ++p) {
      const Label& l = bounds[b][p];
      if (l.is_red()) continue;
      if (l.kind == Label::Kind::Proj ||
          (l.kind == Label::Kind::Simple && l.n == r - 1))
        cuts.push_back(CutRef{b, p});
    }
  // keep only cuts that actually present the diagram as a tangle closure
  std::vector<CycScalar> values;
  for (const CutRef& c : cuts) {
    try {
      values.push_back(renormalized_invariant(alg, d, c));
    } catch (const std::invalid_argument& e) {
      if (std::string(e.what()).find("straightened") == std::string::npos)
        throw;
    }
  }
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] != values[0]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// genus-one dimensions

namespace detail {

/// Commutators of every PBW basis element with the three generators, as one
/// element per (basis, generator) pair.
inline std::vector<AlgElem> basis_commutators(const AlgebraPtr& alg) {
  const long n = alg->r() * alg->r() * alg->r();
  std::vector<AlgElem> gens{alg->E(), alg->F(), alg->K(1)};
  std::vector<AlgElem> out;
  out.reserve(std::size_t(3 * n));
  for (long m = 0; m < n; ++m) {
    AlgElem b = alg->pbw(m);
    for (const AlgElem& g : gens)
      out.push_back(alg->multiply(b, g) - alg->multiply(g, b));
  }
  return out;
}

}  // namespace detail

/// Dimension of the center: kernel of x -> ([x,E],[x,F],[x,K]) on the PBW
/// basis.
inline long center_dim(const AlgebraPtr& alg) {
  const FieldPtr& ctx = alg->ctx();
  const long n = alg->r() * alg->r() * alg->r();
  auto coms = detail::basis_commutators(alg);
  // column m holds the three commutators of basis element m, stacked
  Matrix a(ctx, std::size_t(3 * n), std::size_t(n));
  for (long m = 0; m < n; ++m)
    for (int g = 0; g < 3; ++g)
      for (const auto& [k, c] : coms[std::size_t(3 * m + g)].terms())
        a.at(std::size_t(g * n + k), std::size_t(m)) = c;
  return n - long(a.rank());
}

/// Dimension of the zeroth Hochschild homology: the codimension of the span
/// of all basis commutators.
inline long hh0_dim(const AlgebraPtr& alg) {
  const FieldPtr& ctx = alg->ctx();
  const long n = alg->r() * alg->r() * alg->r();
  auto coms = detail::basis_commutators(alg);
  Matrix a(ctx, std::size_t(n), coms.size());
  for (std::size_t j = 0; j < coms.size(); ++j)
    for (const auto& [k, c] : coms[j].terms())
      a.at(std::size_t(k), j) = c;
  return n - long(a.rank());
}

}  // namespace qtop
