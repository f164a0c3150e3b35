// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Each criterion re-derives its expected values independently of
// the library internals it exercises.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtop/nonsemisimple.hpp"

using namespace qtop;

namespace {

int failures = 0;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

void criterion(int n, const std::string& name,
               const std::function<std::string()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string note;
  bool ok = true;
  std::string why;
  try {
    note = body();
  } catch (const std::exception& e) {
    ok = false;
    why = e.what();
    ++failures;
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0).count();
  std::printf("%s  %2d  %-34s (%.1fs)%s%s\n", ok ? "pass" : "FAIL", n,
              name.c_str(), secs,
              ok ? (note.empty() ? "" : "  ") : "  ",
              ok ? note.c_str() : why.c_str());
  std::fflush(stdout);
}

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(QTOP_FIXTURE_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// displayed decomposition of V_{i1} (x) V_{i2} for even i1, i2
std::vector<std::string> fusion_rule(long r, long i1, long i2) {
  std::vector<std::string> out;
  long lo = std::abs(i1 - i2) / 2;
  long hi = std::min((i1 + i2) / 2, r - (i1 + i2) / 2 - 2);
  for (long n = lo; n <= hi; ++n) out.push_back("V" + std::to_string(2 * n));
  for (long n = r - (i1 + i2) / 2 - 1; n <= (r - 1) / 2; ++n) {
    long m = 2 * n;
    if (m < 0 || m > r - 1) continue;
    out.push_back(m == r - 1 ? "V" + std::to_string(m)
                             : "P" + std::to_string(m));
  }
  return sorted(out);
}

void hopf_axiom_checks(const AlgebraPtr& alg, long m) {
  const FieldPtr& ctx = alg->ctx();
  AlgElem x = alg->pbw(m);
  TensorElem dx = alg->coproduct(x);
  require(alg->coproduct_leg(dx, 0) == alg->coproduct_leg(dx, 1),
          "coassociativity");
  AlgElem left(ctx), right(ctx), anti(ctx);
  for (const auto& [k, c] : dx.terms()) {
    left += alg->pbw(k[1]).scaled(c * alg->counit(alg->pbw(k[0])));
    right += alg->pbw(k[0]).scaled(c * alg->counit(alg->pbw(k[1])));
    anti += alg->multiply(alg->antipode(alg->pbw(k[0])), alg->pbw(k[1]))
                .scaled(c);
  }
  require(left == x && right == x, "counit axiom");
  require(anti == alg->unit().scaled(alg->counit(x)), "antipode axiom");
}

}  // namespace

int main() {
  criterion(1, "hopf and ribbon axioms", [] {
    auto alg3 = SmallQuantumSl2::make(3);
    for (long m = 0; m < 27; ++m) hopf_axiom_checks(alg3, m);
    auto alg5 = SmallQuantumSl2::make(5);
    std::mt19937 rng(7);
    std::uniform_int_distribution<long> pick(0, 125 - 1);
    for (int t = 0; t < 100; ++t) hopf_axiom_checks(alg5, pick(rng));
    for (const auto& alg : {alg3, alg5}) {
      const FieldPtr& ctx = alg->ctx();
      require(alg->multiply(alg->r_matrix(), alg->r_matrix_inv()) ==
                  TensorElem::unit(ctx, 2),
              "R R^{-1} = 1");
      const TensorElem& R = alg->r_matrix();
      TensorElem r12 = R.embed({0, 1}, 3), r13 = R.embed({0, 2}, 3),
                 r23 = R.embed({1, 2}, 3);
      require(alg->coproduct_leg(R, 0) == alg->multiply(r13, r23),
              "(Delta x id)R");
      require(alg->coproduct_leg(R, 1) == alg->multiply(r13, r12),
              "(id x Delta)R");
      require(alg->multiply(alg->multiply(r12, r13), r23) ==
                  alg->multiply(alg->multiply(r23, r13), r12),
              "Yang-Baxter");
      // ribbon element: invertible, central, S(v) = v
      require(alg->multiply(alg->ribbon(), alg->ribbon_inv()) == alg->unit(),
              "v v^{-1} = 1");
      for (const AlgElem& g : {alg->E(), alg->F(), alg->K(1)})
        require(alg->multiply(alg->ribbon(), g) ==
                    alg->multiply(g, alg->ribbon()),
                "v central");
      require(alg->antipode(alg->ribbon()) == alg->ribbon(), "S(v) = v");
    }
    // Delta(v) = M^{-1} (v x v) with M the monodromy matrix, checked at r=3
    {
      const FieldPtr& ctx = alg3->ctx();
      TensorElem vv(ctx, 2);
      for (const auto& [m1, c1] : alg3->ribbon().terms())
        for (const auto& [m2, c2] : alg3->ribbon().terms())
          vv.add_term({m1, m2}, c1 * c2);
      require(alg3->multiply(alg3->m_matrix(), alg3->coproduct(alg3->ribbon())) ==
                  vv,
              "Delta(v) = M^{-1}(v x v)");
    }
    return std::string();
  });

  criterion(2, "s-matrix formula and invertibility", [] {
    for (long r : {3L, 5L, 7L}) {
      auto alg = SmallQuantumSl2::make(r);
      auto ctx = alg->ctx();
      Matrix s = smatrix(alg);  // cross-checked against Hopf-link evaluation
      auto idx = simple_index_set(r);
      require(s.rows() == idx.size(), "size");
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
          require(s.at(a, b) == ctx->qint((idx[a] + 1) * (idx[b] + 1)),
                  "entry formula r=" + std::to_string(r));
      require(s.rank() == s.rows(), "invertibility r=" + std::to_string(r));
    }
    return std::string();
  });

  criterion(3, "gauss-sum column identity", [] {
    for (long r : {3L, 5L, 7L}) {
      auto alg = SmallQuantumSl2::make(r);
      auto ctx = alg->ctx();
      Matrix s = smatrix(alg);
      auto idx = simple_index_set(r);
      CycScalar brace2 = ctx->qbrace(1) * ctx->qbrace(1);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        CycScalar sum = ctx->zero();
        for (std::size_t k = 0; k < idx.size(); ++k)
          sum += ctx->qint(idx[k] + 1) * s.at(k, j);
        CycScalar want =
            j == 0 ? -ctx->from_int(r) / brace2 : ctx->zero();
        require(sum == want, "column " + std::to_string(j) +
                                 " r=" + std::to_string(r));
      }
    }
    return std::string();
  });

  criterion(4, "quantum dimensions", [] {
    for (long r : {3L, 5L, 7L}) {
      auto alg = SmallQuantumSl2::make(r);
      auto ctx = alg->ctx();
      for (long n = 0; n < r; ++n)
        require(qdim(simple_module(alg, n)) == ctx->qint(n + 1),
                "qdim V" + std::to_string(n));
      for (long n = 0; n + 1 < r; ++n)
        require(qdim(projective_module(alg, n)).is_zero(),
                "qdim P" + std::to_string(n));
    }
    return std::string();
  });

  criterion(5, "modified trace axioms", [] {
    for (long r : {3L, 5L}) {
      auto alg = SmallQuantumSl2::make(r);
      auto ctx = alg->ctx();
      for (long n = 0; n + 1 < r; ++n) {
        RepPtr p = projective_module(alg, n);
        require(modified_trace(alg, p, Matrix::identity(ctx, p->dim)) ==
                    ctx->qbrace_prime(n + 1),
                "trace of id on P" + std::to_string(n));
      }
      RepPtr st = simple_module(alg, r - 1);
      require(modified_trace(alg, st, Matrix::identity(ctx, st->dim)) ==
                  ctx->one(),
              "trace of id on the top simple");
      // cyclicity between P_0 and P_1
      RepPtr p0 = projective_module(alg, 0);
      RepPtr p1 = projective_module(alg, 1);
      auto fwd = hom_space(p0, p1);
      auto bwd = hom_space(p1, p0);
      for (const auto& f : fwd)
        for (const auto& g : bwd)
          require(modified_trace(alg, p0, g.matrix * f.matrix) ==
                      modified_trace(alg, p1, f.matrix * g.matrix),
                  "cyclicity");
      // right partial trace over V_1
      RepPtr v1 = simple_module(alg, 1);
      RepPtr a = tensor(alg, p0, v1);
      for (const auto& f : hom_space(a, a))
        require(modified_trace(alg, a, f.matrix) ==
                    modified_trace(alg, p0,
                                   partial_trace_right(p0, v1, f.matrix)),
                "partial trace");
    }
    return std::string();
  });

  criterion(6, "stabilization coefficients", [] {
    for (long r : {3L, 5L, 7L}) {
      auto alg = SmallQuantumSl2::make(r);
      auto ctx = alg->ctx();
      // independent expansion through the ribbon eigenvalues
      CycScalar dp = ctx->zero(), dm = ctx->zero();
      for (long i : simple_index_set(r)) {
        RepPtr v = simple_module(alg, i);
        Matrix act = rep_action(alg, v, alg->ribbon());
        CycScalar theta = act.at(0, 0);
        require(act == Matrix::identity(ctx, v->dim).scaled(theta),
                "ribbon is scalar on simples");
        CycScalar w = ctx->qint(i + 1);
        dp += w * w / theta;
        dm += w * w * theta;
      }
      Normalization ss = ss_normalization(alg);
      require(ss.delta_plus == dp && ss.delta_minus == dm,
              "Kirby expansion r=" + std::to_string(r));
      CycScalar brace1 = ctx->qbrace(1);
      require(ss.delta_minus == ctx->i_pow((r - 1) / 2) * ctx->sqrt_r() *
                                    ctx->q_pow((r + 3) / 2) / brace1,
              "closed form d-");
      require(ss.dcal * ss.dcal == ss.delta_plus * ss.delta_minus &&
                  ss.delta * ss.dcal == ss.delta_plus,
              "normalization identities");
      // integral side
      Normalization ns = nss_normalization(alg);
      CycScalar r32 = ctx->from_int(r) * ctx->sqrt_r();
      require(alg->integral_lambda(alg->ribbon()) == ns.delta_minus,
              "d- = lambda(v)");
      require(alg->integral_lambda(alg->ribbon_inv()) == ns.delta_plus,
              "d+ = lambda(v^{-1})");
      require(ns.delta_minus == ctx->i_pow((r - 1) / 2) * r32 *
                                    ctx->q_pow((r + 3) / 2),
              "closed form lambda(v)");
      require(ns.delta_plus == ctx->i_pow(-(r - 1) / 2) * r32 *
                                   ctx->q_pow((r - 3) / 2),
              "closed form lambda(v^{-1})");
    }
    return std::string();
  });

  criterion(7, "tensor decomposition of simples", [] {
    for (long r : {3L, 5L, 7L}) {
      auto alg = SmallQuantumSl2::make(r);
      for (long i1 = 0; i1 <= r - 1; i1 += 2)
        for (long i2 = i1; i2 <= r - 1; i2 += 2) {
          auto got = sorted(decompose(
              alg, tensor(alg, simple_module(alg, i1), simple_module(alg, i2))));
          require(got == fusion_rule(r, i1, i2),
                  "V" + std::to_string(i1) + " x V" + std::to_string(i2) +
                      " r=" + std::to_string(r));
        }
    }
    return std::string();
  });

  criterion(8, "state space dimensions", [] {
    for (long r : {3L, 5L, 7L})
      require(verlinde_dim(r, 1) == (r - 1) / 2, "genus 1");
    // genus 2 through two inequivalent trivalent graphs at r=5
    std::vector<std::array<long, 3>> theta{{0, 1, 2}, {0, 1, 2}};
    require(triangular_labelings(5, theta, 3) == verlinde_dim(5, 2),
            "genus 2 graph independence");
    // genus 1 through the negligible-quotient hom spaces
    for (long r : {3L, 5L}) {
      auto alg = SmallQuantumSl2::make(r);
      RepPtr unit = simple_module(alg, 0);
      long total = 0;
      for (long i : simple_index_set(r)) {
        RepPtr v = simple_module(alg, i);
        total += long(
            negligible_quotient_dim(alg, unit, tensor(alg, v, dual(alg, v))));
      }
      require(total == verlinde_dim(r, 1), "quotient homs r=" + std::to_string(r));
    }
    return std::string();
  });

  criterion(9, "center and zeroth hochschild", [] {
    for (long r : {3L, 5L}) {
      auto alg = SmallQuantumSl2::make(r);
      long want = (3 * r - 1) / 2;
      require(center_dim(alg) == want, "center r=" + std::to_string(r));
      require(hh0_dim(alg) == want, "hh0 r=" + std::to_string(r));
    }
    return std::string();
  });

  criterion(10, "vanishing and lens space ratio", [] {
    std::string report;
    for (long r : {3L, 5L}) {
      auto alg = SmallQuantumSl2::make(r);
      auto ctx = alg->ctx();
      Diagram s2s1 = parse_diagram(fixture("surgery_s2xs1.tg"));
      require(hennings_invariant(alg, s2s1).is_zero(), "S^2 x S^1 vanishes");
      std::vector<CycScalar> ratios;
      for (long p = 1; p <= 6; ++p) {
        Diagram d = p == 1 ? parse_diagram(fixture("surgery_s3.tg"))
                           : parse_diagram(fixture("lens_" + std::to_string(p) +
                                                   "_1.tg"));
        CycScalar h = hennings_invariant(alg, d);
        CycScalar rt = rt_invariant(alg, d);
        require(!rt.is_zero(), "surgery invariant nonzero");
        ratios.push_back(h / (ctx->from_int(p) * rt));
      }
      for (std::size_t k = 1; k < ratios.size(); ++k)
        require(ratios[k] == ratios[0], "ratio constant r=" + std::to_string(r));
      report += "r=" + std::to_string(r) + ": " + ratios[0].str() + "  ";
    }
    return report;
  });

  criterion(11, "invariance fixtures", [] {
    auto alg = SmallQuantumSl2::make(3);
    auto load = [](const std::string& n) { return parse_diagram(fixture(n)); };
    // handle slide and framed second Reidemeister move
    require(rt_invariant(alg, load("red_slide_a.tg")) ==
                rt_invariant(alg, load("red_slide_b.tg")),
            "surgery invariant under a slide");
    require(rt_invariant(alg, load("red_r2_a.tg")) ==
                rt_invariant(alg, load("red_r2_b.tg")),
            "surgery invariant under r2");
    TangleEvaluator ev(alg);
    require(ev.evaluate_blue(load("twist_slide_a.tg")) ==
                ev.evaluate_blue(load("twist_slide_b.tg")),
            "twist slides past a crossing");
    require(hennings_invariant(alg, load("red_slide_a.tg")) ==
                hennings_invariant(alg, load("red_slide_b.tg")),
            "bead invariant under a slide");
    require(hennings_invariant(alg, load("red_r2_a.tg")) ==
                hennings_invariant(alg, load("red_r2_b.tg")),
            "bead invariant under r2");
    // +-1 stabilization: both framed unknots give the empty-diagram value
    Diagram empty = parse_diagram("");
    for (const char* n : {"surgery_s3.tg", "surgery_s3_neg.tg"}) {
      require(rt_invariant(alg, load(n)) == rt_invariant(alg, empty),
              std::string("surgery stabilization ") + n);
      require(hennings_invariant(alg, load(n)) ==
                  hennings_invariant(alg, empty),
              std::string("bead stabilization ") + n);
    }
    // renormalized invariant across cutting presentations
    require(cutting_independence_check(alg, load("two_P0_unknots.tg")),
            "cut independence, split diagram");
    require(cutting_independence_check(alg, load("hopf_P0_P0.tg")),
            "cut independence, linked diagram");
    return std::string();
  });

  criterion(12, "end structure and transmutation", [] {
    auto alg = SmallQuantumSl2::make(3);
    RepPtr ad = adjoint_rep(alg);
    RepPtr p0 = projective_module(alg, 0);
    RepPtr v1 = simple_module(alg, 1);
    for (const RepPtr& x : {v1, p0}) {
      Matrix j = end_structure_j(alg, x);
      RepPtr t = tensor(alg, x, dual(alg, x));
      require(t->actE * j == j * ad->actE && t->actF * j == j * ad->actF &&
                  t->actK * j == j * ad->actK,
              "j_X intertwines on " + x->label);
    }
    // dinaturality: for f in Hom(A,B), (f x id) j_A = (id x f^*) j_B, which
    // in matrix terms is f rho_A(b) = rho_B(b) f over the whole basis
    RepPtr v0 = simple_module(alg, 0);
    std::vector<std::pair<RepPtr, RepPtr>> pairs{{p0, p0}, {p0, v0}, {v0, p0}};
    for (const auto& [a, b] : pairs) {
      auto homs = hom_space(a, b);
      require(!homs.empty(), "hom space is nonzero");
      for (const auto& f : homs)
        for (long m = 0; m < 27; ++m)
          require(f.matrix * rep_action(alg, a, alg->pbw(m)) ==
                      rep_action(alg, b, alg->pbw(m)) * f.matrix,
                  "dinaturality");
    }
    // both printed forms of the transmuted structure agree on the whole
    // basis (compared inside the calls)
    for (long m = 0; m < 27; ++m) {
      alg->transmutation_coproduct(alg->pbw(m));
      alg->transmutation_antipode(alg->pbw(m));
    }
    return std::string();
  });

  if (failures) {
    std::printf("%d criteria FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
