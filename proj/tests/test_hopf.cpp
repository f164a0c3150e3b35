#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qtop/hopf.hpp"

using namespace qtop;

namespace {

TensorElem outer(const SmallQuantumSl2& alg, const AlgElem& x, const AlgElem& y) {
  TensorElem out(alg.ctx(), 2);
  for (const auto& [mx, cx] : x.terms())
    for (const auto& [my, cy] : y.terms()) out.add_term({mx, my}, cx * cy);
  return out;
}

}  // namespace

TEST_CASE("defining relations") {
  auto alg = SmallQuantumSl2::make(5);
  const long r = 5;

  // K^r = 1
  AlgElem kk = alg->K(1);
  for (long j = 1; j < r; ++j) kk = alg->multiply(kk, alg->K(1));
  CHECK(kk == alg->unit());
  CHECK(alg->multiply(alg->K(1), alg->K(r - 1)) == alg->unit());

  // E F = F E + (K - K^{-1})/(q - q^{-1})
  AlgElem lhs = alg->multiply(alg->E(), alg->F());
  AlgElem rhs = alg->multiply(alg->F(), alg->E());
  CycScalar inv_brace = alg->ctx()->qbrace(1).inverse();
  rhs += alg->K(1).scaled(inv_brace) - alg->K(-1).scaled(inv_brace);
  CHECK(lhs == rhs);

  // E^r = F^r = 0
  AlgElem epow = alg->E();
  for (long j = 1; j < r; ++j) epow = alg->multiply(epow, alg->E());
  CHECK(epow.is_zero());
  AlgElem fpow = alg->F();
  for (long j = 1; j < r; ++j) fpow = alg->multiply(fpow, alg->F());
  CHECK(fpow.is_zero());

  // K E K^{-1} = q^2 E and K F K^{-1} = q^{-2} F
  AlgElem kek = alg->multiply(alg->multiply(alg->K(1), alg->E()), alg->K(-1));
  CHECK(kek == alg->E().scaled(alg->ctx()->q_pow(2)));
  AlgElem kfk = alg->multiply(alg->multiply(alg->K(1), alg->F()), alg->K(-1));
  CHECK(kfk == alg->F().scaled(alg->ctx()->q_pow(-2)));
}

TEST_CASE("hopf structure maps on generators") {
  auto alg = SmallQuantumSl2::make(5);
  auto ctx = alg->ctx();

  TensorElem dk(ctx, 2);
  dk.add_term({PbwIndex::pack(5, 0, 0, 1), PbwIndex::pack(5, 0, 0, 1)}, ctx->one());
  CHECK(alg->coproduct(alg->K(1)) == dk);

  // S(E) = -E K^{-1}
  AlgElem se(ctx);
  se.add_term(PbwIndex::pack(5, 1, 0, 4), -ctx->one());
  CHECK(alg->antipode(alg->E()) == se);
  // S(F) = -K F = -q^{-2} F K
  AlgElem sf(ctx);
  sf.add_term(PbwIndex::pack(5, 0, 1, 1), -ctx->q_pow(-2));
  CHECK(alg->antipode(alg->F()) == sf);
  CHECK(alg->antipode(alg->K(1)) == alg->K(-1));

  CHECK(alg->coproduct(alg->unit()) == TensorElem::unit(ctx, 2));
  CHECK(alg->counit(alg->unit()) == ctx->one());
  CHECK(alg->antipode(alg->unit()) == alg->unit());
  CHECK(alg->counit(alg->E()).is_zero());
  CHECK(alg->counit(alg->F()).is_zero());
  CHECK(alg->counit(alg->K(1)) == ctx->one());
}

TEST_CASE("hopf axioms on the PBW basis") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    auto ctx = alg->ctx();
    std::mt19937 rng(42);
    std::vector<long> basis;
    if (r == 3) {
      for (long m = 0; m < 27; ++m) basis.push_back(m);
    } else {
      std::uniform_int_distribution<long> pick(0, r * r * r - 1);
      for (int t = 0; t < 10; ++t) basis.push_back(pick(rng));
    }
    for (long m : basis) {
      AlgElem x = alg->pbw(m);
      TensorElem dx = alg->coproduct(x);
      // coassociativity
      CHECK(alg->coproduct_leg(dx, 0) == alg->coproduct_leg(dx, 1));
      // counit axiom: (eps (x) id) Delta = id
      AlgElem left(ctx), right(ctx);
      for (const auto& [k, c] : dx.terms()) {
        left += alg->pbw(k[1]).scaled(c * alg->counit(alg->pbw(k[0])));
        right += alg->pbw(k[0]).scaled(c * alg->counit(alg->pbw(k[1])));
      }
      CHECK(left == x);
      CHECK(right == x);
      // antipode axiom: mu (S (x) id) Delta = eta eps
      AlgElem anti(ctx);
      for (const auto& [k, c] : dx.terms())
        anti += alg->multiply(alg->antipode(alg->pbw(k[0])), alg->pbw(k[1])).scaled(c);
      CHECK(anti == alg->unit().scaled(alg->counit(x)));
    }
  }
}

TEST_CASE("r-matrix basics") {
  auto alg = SmallQuantumSl2::make(3);
  auto ctx = alg->ctx();

  CHECK(alg->multiply(alg->r_matrix(), alg->r_matrix_inv()) ==
        TensorElem::unit(ctx, 2));

  // (eps (x) id)(R) = 1 and (id (x) eps)(R) = 1
  AlgElem a(ctx), b(ctx);
  for (const auto& [k, c] : alg->r_matrix().terms()) {
    a += alg->pbw(k[1]).scaled(c * alg->counit(alg->pbw(k[0])));
    b += alg->pbw(k[0]).scaled(c * alg->counit(alg->pbw(k[1])));
  }
  CHECK(a == alg->unit());
  CHECK(b == alg->unit());
}

TEST_CASE("quasi-triangularity and Yang-Baxter") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    const TensorElem& R = alg->r_matrix();
    TensorElem r12 = R.embed({0, 1}, 3);
    TensorElem r13 = R.embed({0, 2}, 3);
    TensorElem r23 = R.embed({1, 2}, 3);

    // (Delta (x) id)(R) = R13 R23 and (id (x) Delta)(R) = R13 R12
    CHECK(alg->coproduct_leg(R, 0) == alg->multiply(r13, r23));
    CHECK(alg->coproduct_leg(R, 1) == alg->multiply(r13, r12));

    // R12 R13 R23 = R23 R13 R12
    TensorElem lhs = alg->multiply(alg->multiply(r12, r13), r23);
    TensorElem rhs = alg->multiply(alg->multiply(r23, r13), r12);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("monodromy matrix") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    CHECK(alg->m_matrix() == alg->m_matrix_formula());
  }
}

TEST_CASE("ribbon and drinfeld elements") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    auto ctx = alg->ctx();
    const AlgElem& v = alg->ribbon();
    const AlgElem& vi = alg->ribbon_inv();

    CHECK(alg->multiply(v, vi) == alg->unit());
    // v = u g^{-1}
    CHECK(alg->multiply(alg->drinfeld_u(), alg->K(-1)) == v);
    // centrality
    for (const AlgElem& g : {alg->E(), alg->F(), alg->K(1)})
      CHECK(alg->multiply(v, g) == alg->multiply(g, v));

    CHECK(alg->antipode(v) == v);
    CHECK(alg->counit(v) == ctx->one());
    // v^2 = u S(u)
    CHECK(alg->multiply(v, v) ==
          alg->multiply(alg->drinfeld_u(), alg->antipode(alg->drinfeld_u())));
    // Delta(v) = M^{-1} (v (x) v), checked as Delta(v) M = v (x) v
    CHECK(alg->multiply(alg->coproduct(v), alg->m_matrix()) == outer(*alg, v, v));
  }
}

TEST_CASE("right integral") {
  auto alg = SmallQuantumSl2::make(5);
  auto ctx = alg->ctx();
  const long r = 5;

  AlgElem top(ctx);
  top.add_term(PbwIndex::pack(r, r - 1, r - 1, 1), ctx->one());
  CHECK(alg->integral_lambda(top) ==
        ctx->from_int(r * r * r) / ctx->qbrace(1).pow(2 * r - 2));
  CHECK(alg->integral_lambda(alg->unit()).is_zero());

  // lambda(v) and lambda(v^{-1}) against the stabilization coefficients
  CycScalar r32 = ctx->from_int(r) * ctx->sqrt_r();
  CHECK(alg->integral_lambda(alg->ribbon()) ==
        ctx->i_pow((r - 1) / 2) * r32 * ctx->q_pow((r + 3) / 2));
  CHECK(alg->integral_lambda(alg->ribbon_inv()) ==
        ctx->i_pow(-(r - 1) / 2) * r32 * ctx->q_pow((r - 3) / 2));
}

TEST_CASE("integral one-sidedness is pinned") {
  auto alg = SmallQuantumSl2::make(3);
  auto ctx = alg->ctx();
  bool right_all = true, left_all = true;
  for (long m = 0; m < 27; ++m) {
    AlgElem x = alg->pbw(m);
    TensorElem dx = alg->coproduct(x);
    AlgElem lhs_r(ctx), lhs_l(ctx);
    for (const auto& [k, c] : dx.terms()) {
      lhs_r += alg->pbw(k[1]).scaled(c * alg->integral_lambda(alg->pbw(k[0])));
      lhs_l += alg->pbw(k[0]).scaled(c * alg->integral_lambda(alg->pbw(k[1])));
    }
    AlgElem expect = alg->unit().scaled(alg->integral_lambda(x));
    if (lhs_r != expect) right_all = false;
    if (lhs_l != expect) left_all = false;
  }
  // exactly one side holds; the build pins which
  CHECK(right_all != left_all);
  CHECK(right_all);
}

TEST_CASE("drinfeld map and factorizability") {
  auto alg = SmallQuantumSl2::make(3);
  auto ctx = alg->ctx();

  // D(eps) = 1: eps as a linear form is 1 on pure K powers
  LinearForm eps(ctx);
  for (long c = 0; c < 3; ++c) eps.set(PbwIndex::pack(3, 0, 0, c), ctx->one());
  CHECK(alg->drinfeld_map(eps) == alg->unit());

  CHECK(alg->is_factorizable());

  // hopf_pairing through the same matrix: omega(e_i, e_j) = D-matrix entry
  Matrix d = alg->drinfeld_matrix();
  LinearForm phi = LinearForm::dual_basis(ctx, 5);
  LinearForm psi = LinearForm::dual_basis(ctx, 17);
  CHECK(alg->hopf_pairing(phi, psi) == d.at(17, 5));
}

TEST_CASE("drinfeld map full rank at r=5") {
  auto alg = SmallQuantumSl2::make(5);
  CHECK(alg->drinfeld_matrix().rank() == 125);
}

TEST_CASE("transmutation") {
  auto alg = SmallQuantumSl2::make(3);
  auto ctx = alg->ctx();

  CHECK(alg->transmutation_coproduct(alg->unit()) == TensorElem::unit(ctx, 2));
  // the transmuted counit equals the counit
  CHECK(alg->counit(alg->K(1)) == ctx->one());
  // both printed forms of the transmuted antipode agree (asserted internally)
  CHECK_NOTHROW(alg->transmutation_antipode(alg->E()));
  CHECK_NOTHROW(alg->transmutation_coproduct(alg->E()));
  CHECK_NOTHROW(alg->transmutation_coproduct(alg->F()));
}
