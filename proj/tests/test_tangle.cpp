#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qtop/tangle.hpp"

using namespace qtop;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(QTOP_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string recolor(std::string text, const std::string& from,
                    const std::string& to) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = text.find(from, pos);
    if (hit == std::string::npos) {
      out += text.substr(pos);
      return out;
    }
    out += text.substr(pos, hit - pos);
    out += to;
    pos = hit + from.size();
  }
}

CycScalar lambda_contract(const AlgebraPtr& alg, const TensorElem& beads) {
  CycScalar acc = alg->ctx()->zero();
  for (const auto& [k, c] : beads.terms()) {
    CycScalar t = c;
    for (long m : k) t *= alg->integral_lambda(alg->pbw(m));
    acc += t;
  }
  return acc;
}

// plain cyclic Jacobi eigenvalue iteration, used as a numeric signature oracle
int numeric_signature(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(m[p][q]) < 1e-15) continue;
        double theta = (m[q][q] - m[p][p]) / (2 * m[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double mkp = m[k][p], mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double mpk = m[p][k], mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
      }
  }
  int sig = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i][i] > 1e-9) ++sig;
    else if (m[i][i] < -1e-9) --sig;
  }
  return sig;
}

}  // namespace

TEST_CASE("label trees") {
  Label v3 = Label::simple(3);
  CHECK(v3.str() == "V3");
  CHECK(Label::proj(1).str() == "P1");
  CHECK(Label::dual_of(v3).str() == "V3*");
  CHECK(Label::tensor_of(v3, Label::proj(0)).str() == "(V3(x)P0)");
  // red is self-dual as a decoration
  CHECK(Label::dual_of(Label::red()).str() == "red");
}

TEST_CASE("parser accepts and rejects") {
  CHECK_NOTHROW(parse_diagram("rcoev(V1); lev(V1)"));
  CHECK_NOTHROW(parse_diagram("lcoev(V1*); rev(V1*)"));
  CHECK_NOTHROW(parse_diagram("id((V1(x)V2)*)"));

  // boundary mismatch carries both label sequences
  try {
    parse_diagram("id(V1), id(V2); id(V2)");
    FAIL("expected boundary mismatch");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("V1") != std::string::npos);
    CHECK(msg.find("V2") != std::string::npos);
    CHECK(msg.find("mismatch") != std::string::npos);
  }

  // syntax errors carry line and column
  try {
    parse_diagram("id(V1);\nbogus(V1)");
    FAIL("expected syntax error");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_diagram("id(red*)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_diagram("id((red(x)V1))"), std::invalid_argument);
  CHECK_THROWS_AS(parse_diagram("coup(f)"), std::invalid_argument);  // unknown

  // red labels may not appear in coupons
  auto alg = SmallQuantumSl2::make(3);
  Coupon c;
  c.source = {Label::red()};
  c.target = {Label::red()};
  c.matrix = Matrix::identity(alg->ctx(), 1);
  CHECK_THROWS_AS(parse_diagram("coup(f)", {{"f", c}}), std::invalid_argument);
}

TEST_CASE("all fixtures parse") {
  for (const char* name :
       {"unknot_V1.tg", "unknot_P0.tg", "hopf_V2_V2.tg", "hopf_P0_P0.tg",
        "two_P0_unknots.tg", "surgery_s3.tg", "surgery_s3_neg.tg",
        "surgery_s2xs1.tg", "lens_2_1.tg", "lens_5_1.tg", "r2_a.tg", "r2_b.tg",
        "r3_a.tg", "r3_b.tg", "twist_slide_a.tg", "twist_slide_b.tg",
        "red_r2_a.tg", "red_r2_b.tg", "red_slide_a.tg", "red_slide_b.tg"}) {
    INFO(name);
    CHECK_NOTHROW(parse_diagram(fixture(name)));
  }
  CHECK(parse_diagram(fixture("hopf_V2_V2.tg")).is_closed());
  CHECK(parse_diagram(fixture("red_slide_a.tg")).is_closed());
}

TEST_CASE("blue unknots") {
  Diagram empty;
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    auto ctx = alg->ctx();
    TangleEvaluator ev(alg);
    CHECK(ev.evaluate_blue(empty).at(0, 0) == ctx->one());
    for (long n = 0; n < r; ++n) {
      std::string l = "V" + std::to_string(n);
      auto d1 = parse_diagram("lcoev(" + l + "); rev(" + l + ")");
      auto d2 = parse_diagram("rcoev(" + l + "); lev(" + l + ")");
      CHECK(ev.evaluate_blue(d1).at(0, 0) == ctx->qint(n + 1));
      CHECK(ev.evaluate_blue(d2).at(0, 0) == ctx->qint(n + 1));
    }
  }
}

TEST_CASE("blue hopf links match the closed double braiding values") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    auto ctx = alg->ctx();
    TangleEvaluator ev(alg);
    for (long i = 0; i <= r - 1; i += 2)
      for (long j = 0; j <= r - 1; j += 2) {
        std::string a = "V" + std::to_string(i), b = "V" + std::to_string(j);
        auto d = parse_diagram(
            "lcoev(" + a + ");"
            "id(" + a + "), lcoev(" + b + "), id(" + a + "*);"
            "x+(" + a + "," + b + "), id(" + b + "*), id(" + a + "*);"
            "x+(" + b + "," + a + "), id(" + b + "*), id(" + a + "*);"
            "id(" + a + "), rev(" + b + "), id(" + a + "*);"
            "rev(" + a + ")");
        INFO("r=" << r << " i=" << i << " j=" << j);
        CHECK(ev.evaluate_blue(d).at(0, 0) == ctx->qint((i + 1) * (j + 1)));
      }
  }
}

TEST_CASE("framed Reidemeister move pairs") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    TangleEvaluator ev(alg);
    for (const std::string color : {"V1", "P0"}) {
      for (const char* base : {"r2", "r3", "twist_slide"}) {
        std::string ta = recolor(fixture(std::string(base) + "_a.tg"), "V1", color);
        std::string tb = recolor(fixture(std::string(base) + "_b.tg"), "V1", color);
        INFO("r=" << r << " color=" << color << " move=" << base);
        Matrix ma = ev.evaluate_blue(parse_diagram(ta));
        Matrix mb = ev.evaluate_blue(parse_diagram(tb));
        CHECK(ma == mb);
      }
    }
  }
}

TEST_CASE("double braiding equals the M-matrix action") {
  auto alg = SmallQuantumSl2::make(3);
  TangleEvaluator ev(alg);
  Label a = Label::simple(1), b = Label::simple(2);
  Matrix c1 = ev.crossing_matrix(a, b, true);
  Matrix c2 = ev.crossing_matrix(b, a, true);
  RepPtr A = ev.resolve(a), B = ev.resolve(b);
  Matrix rho(alg->ctx(), A->dim * B->dim, A->dim * B->dim);
  const TensorElem& M = alg->m_matrix();
  for (const auto& [k, c] : M.terms()) {
    Matrix ma = rep_action(alg, A, alg->pbw(k[0]));
    Matrix mb = rep_action(alg, B, alg->pbw(k[1]));
    rho = rho + ma.kron(mb).scaled(c);
  }
  CHECK((c2 * c1) == rho);
}

TEST_CASE("crossing matrices match the brute expansion of R") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    auto ctx = alg->ctx();
    TangleEvaluator ev(alg);
    Label la = Label::simple(1), lb = Label::dual_of(Label::simple(2));
    RepPtr A = ev.resolve(la), B = ev.resolve(lb);
    std::size_t da = A->dim, db = B->dim;
    for (bool pos : {true, false}) {
      const TensorElem& R = pos ? alg->r_matrix() : alg->r_matrix_inv();
      Matrix out(ctx, da * db, da * db);
      if (pos) {
        Matrix rho(ctx, da * db, da * db);
        for (const auto& [k, c] : R.terms())
          rho = rho + rep_action(alg, A, alg->pbw(k[0]))
                          .kron(rep_action(alg, B, alg->pbw(k[1])))
                          .scaled(c);
        for (std::size_t i = 0; i < da; ++i)
          for (std::size_t j = 0; j < db; ++j)
            for (std::size_t cc = 0; cc < da * db; ++cc)
              out.at(j * da + i, cc) = rho.at(i * db + j, cc);
      } else {
        Matrix rho(ctx, db * da, db * da);
        for (const auto& [k, c] : R.terms())
          rho = rho + rep_action(alg, B, alg->pbw(k[0]))
                          .kron(rep_action(alg, A, alg->pbw(k[1])))
                          .scaled(c);
        for (std::size_t i = 0; i < da; ++i)
          for (std::size_t j = 0; j < db; ++j)
            for (std::size_t rr = 0; rr < db * da; ++rr)
              out.at(rr, i * db + j) = rho.at(rr, j * da + i);
      }
      INFO("r=" << r << " positive=" << pos);
      CHECK(ev.crossing_matrix(la, lb, pos) == out);
    }
  }
}

TEST_CASE("bead calibration on framed unknots") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    TangleEvaluator ev(alg);
    CycScalar dplus = alg->integral_lambda(alg->ribbon_inv());
    CycScalar dminus = alg->integral_lambda(alg->ribbon());
    auto lam = [&](const std::string& text) {
      return lambda_contract(alg, ev.universal_beads(parse_diagram(text)));
    };
    CHECK(lam(fixture("surgery_s2xs1.tg")).is_zero());
    CHECK(lam("rcoev(red); lev(red)").is_zero());
    CHECK(lam(fixture("surgery_s3.tg")) == dplus);
    CHECK(lam(fixture("surgery_s3_neg.tg")) == dminus);
    // presentation independence of the twists
    CHECK(lam("rcoev(red); id(red), tw+(red); lev(red)") == dplus);
    CHECK(lam("rcoev(red); id(red), tw-(red); lev(red)") == dminus);
    // curls: one strand of a kink runs downward, so x+ gives the -1 framing
    for (std::string cup : {"lcoev", "rcoev"})
      for (std::string cap : {"rev", "lev"}) {
        INFO("r=" << r << " " << cup << "/" << cap);
        CHECK(lam(cup + "(red); x+(red,red); " + cap + "(red)") == dminus);
        CHECK(lam(cup + "(red); x-(red,red); " + cap + "(red)") == dplus);
      }
  }
}

TEST_CASE("bead invariance under red moves") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    TangleEvaluator ev(alg);
    auto lam = [&](const std::string& name) {
      return lambda_contract(alg, ev.universal_beads(parse_diagram(fixture(name))));
    };
    INFO("r=" << r);
    CHECK(lam("red_r2_a.tg") == lam("red_r2_b.tg"));
    // handle slide: linking (2,1;1,1) presentation of the +1,+1 unlink
    CHECK(lam("red_slide_a.tg") == lam("red_slide_b.tg"));
  }
}

TEST_CASE("linking matrices and signatures") {
  auto alg = SmallQuantumSl2::make(3);
  TangleEvaluator ev(alg);

  SurgeryData e = ev.linking_matrix(Diagram{});
  CHECK(e.components == 0);
  CHECK(e.signature == 0);

  SurgeryData s3 = ev.linking_matrix(parse_diagram(fixture("surgery_s3.tg")));
  CHECK(s3.components == 1);
  CHECK(s3.linking[0][0] == 1);
  CHECK(s3.signature == 1);
  CHECK(ev.linking_matrix(parse_diagram(fixture("surgery_s3_neg.tg"))).signature ==
        -1);
  CHECK(ev.linking_matrix(parse_diagram(fixture("surgery_s2xs1.tg"))).signature ==
        0);

  for (long p : {2L, 3L, 6L}) {
    SurgeryData lp = ev.linking_matrix(
        parse_diagram(fixture("lens_" + std::to_string(p) + "_1.tg")));
    CHECK(lp.components == 1);
    CHECK(lp.linking[0][0] == p);
    CHECK(lp.signature == 1);
  }

  // curl framings agree with the bead values: x+ curls are -1 framed
  SurgeryData kp = ev.linking_matrix(parse_diagram("lcoev(red); x+(red,red); rev(red)"));
  SurgeryData km = ev.linking_matrix(parse_diagram("lcoev(red); x-(red,red); rev(red)"));
  CHECK(kp.linking[0][0] == -1);
  CHECK(km.linking[0][0] == 1);

  SurgeryData hs = ev.linking_matrix(parse_diagram(fixture("red_slide_a.tg")));
  CHECK(hs.components == 2);
  CHECK(hs.linking == std::vector<std::vector<long>>{{2, 1}, {1, 1}});
  CHECK(hs.signature == 2);
}

TEST_CASE("exact signature matches a numeric eigenvalue oracle") {
  std::mt19937 rng(20260823);
  std::uniform_int_distribution<int> entry(-4, 4);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 1 + trial % 5;
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, Rational(0)));
    std::vector<std::vector<double>> md(n, std::vector<double>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        int v = entry(rng);
        m[i][j] = m[j][i] = Rational(v);
        md[i][j] = md[j][i] = v;
      }
    CHECK(integer_signature(m) == numeric_signature(md));
  }
}

TEST_CASE("cut evaluation of unknots") {
  for (long r : {3L, 5L}) {
    auto alg = SmallQuantumSl2::make(r);
    auto ctx = alg->ctx();
    TangleEvaluator ev(alg);
    auto d1 = parse_diagram(fixture("unknot_P0.tg"));
    Matrix f1 = ev.evaluate_bichrome_cut(d1, CutRef{1, 0});
    CHECK(f1 == Matrix::identity(ctx, 2 * r));

    auto d2 = parse_diagram("rcoev(P0); lev(P0)");
    CHECK(ev.evaluate_bichrome_cut(d2, CutRef{1, 1}) ==
          Matrix::identity(ctx, 2 * r));

    std::string st = "V" + std::to_string(r - 1);
    auto d3 = parse_diagram("lcoev(" + st + "); rev(" + st + ")");
    CHECK(ev.evaluate_bichrome_cut(d3, CutRef{1, 0}) ==
          Matrix::identity(ctx, r));
  }
}

TEST_CASE("cut admissibility errors") {
  auto alg = SmallQuantumSl2::make(3);
  TangleEvaluator ev(alg);
  auto d = parse_diagram(fixture("unknot_V1.tg"));
  CHECK_THROWS_WITH(ev.evaluate_bichrome_cut(d, CutRef{1, 0}),
                    Catch::Matchers::ContainsSubstring("inadmissible cut"));
  auto dp = parse_diagram(fixture("unknot_P0.tg"));
  CHECK_THROWS_WITH(ev.evaluate_bichrome_cut(dp, CutRef{7, 0}),
                    Catch::Matchers::ContainsSubstring("inadmissible cut"));
}

TEST_CASE("bichrome evaluation basics") {
  auto alg = SmallQuantumSl2::make(3);
  auto ctx = alg->ctx();
  TangleEvaluator ev(alg);
  CycScalar dplus = alg->integral_lambda(alg->ribbon_inv());

  // a 0-framed red circle poked over a blue strand versus the split union
  auto around = parse_diagram(
      "lcoev(V1);"
      "id(V1), lcoev(red), id(V1*);"
      "x+(V1,red), id(red), id(V1*);"
      "x-(red,V1), id(red), id(V1*);"
      "id(V1), rev(red), id(V1*);"
      "rev(V1)");
  auto split = parse_diagram("lcoev(V1), lcoev(red); rev(V1), rev(red)");
  CHECK(ev.evaluate_bichrome_closed(around) == ev.evaluate_bichrome_closed(split));

  // disjoint unions multiply
  auto disj = parse_diagram(
      "lcoev(red), lcoev(V1);"
      "tw+(red), id(red), id(V1), id(V1*);"
      "rev(red), rev(V1)");
  CHECK(ev.evaluate_bichrome_closed(disj) == dplus * ctx->qint(2));
}
