// Command line front end: quantum invariants of closed 3-manifolds and
// embedded graphs from sliced diagram files.
//
// Subcommands
//   rt        surgery invariant from the semisimplified category
//   hennings  integral-based surgery invariant
//   lprime    renormalized invariant of a bichrome diagram with a cut edge
//   smatrix   the (r-1)/2 square S-matrix and its invertibility
//   verlinde  graded dimension of the genus-g state space
//   verify    structural self-checks at a given root order
//   tables    reference scalars: quantum dimensions, traces, normalizations
//
// Exit codes: 0 success, 1 parse error, 2 inadmissible input,
// 3 internal consistency failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtop/nonsemisimple.hpp"

using json = nlohmann::ordered_json;
using namespace qtop;

namespace {

// ---------------------------------------------------------------------------
// output helpers

std::string approx_str(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v + 0.0);  // normalize -0
  return buf;
}

json scalar_json(const CycScalar& s) {
  json out;
  out["order"] = s.ctx()->order();
  json coeffs = json::array();
  for (const auto& c : s.coeffs()) {
    coeffs.push_back(
        json::array({c.get_num().get_str(), c.get_den().get_str()}));
  }
  out["coeffs"] = coeffs;
  auto a = s.approx();
  out["approx"] = json::array({a.real(), a.imag()});
  return out;
}

std::string scalar_table(const CycScalar& s) {
  auto a = s.approx();
  return s.str() + "  ~ (" + approx_str(a.real()) + ", " +
         approx_str(a.imag()) + ")";
}

void emit(const json& j, const std::string& format) {
  if (format == "json") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  // flat key: value rendering for table mode
  std::function<void(const json&, const std::string&)> walk =
      [&](const json& node, const std::string& prefix) {
        if (node.is_object()) {
          for (auto it = node.begin(); it != node.end(); ++it)
            walk(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
        } else if (node.is_array()) {
          for (std::size_t i = 0; i < node.size(); ++i)
            walk(node[i], prefix + "[" + std::to_string(i) + "]");
        } else {
          std::cout << prefix << ": " << (node.is_string()
              ? node.get<std::string>() : node.dump()) << "\n";
        }
      };
  walk(j, "");
}

json result_scalar(const CycScalar& s, const std::string& format) {
  if (format == "json") return scalar_json(s);
  return scalar_table(s);
}

// ---------------------------------------------------------------------------
// diagram input

Label parse_label(const std::string& s) {
  Diagram d = parse_diagram("id(" + s + ")");
  return d.slices.at(0).at(0).a;
}

mpz_class parse_mpz(const json& v) {
  return v.is_string() ? mpz_class(v.get<std::string>())
                       : mpz_class(v.get<long>());
}

Rational parse_rational(const json& v) {
  Rational q;
  if (v.is_number_integer()) {
    q = Rational(v.get<long>());
  } else if (v.is_string()) {
    q = Rational(v.get<std::string>());  // "n" or "n/d"
  } else if (v.is_array() && v.size() == 2) {
    q = Rational(parse_mpz(v[0]), parse_mpz(v[1]));
  } else {
    throw std::invalid_argument("coupon matrix: bad rational entry");
  }
  q.canonicalize();
  return q;
}

CycScalar parse_scalar(const FieldPtr& ctx, const json& v) {
  // a coefficient list in the power basis of the field; each coefficient
  // is an integer, an "n/d" string, or a [num, den] pair.  A bare integer
  // or string is shorthand for a rational constant.
  std::vector<Rational> coeffs(ctx->degree(), Rational(0));
  if (v.is_array()) {
    if (v.size() > coeffs.size())
      throw std::invalid_argument("coupon matrix: coefficient list too long");
    for (std::size_t k = 0; k < v.size(); ++k) coeffs[k] = parse_rational(v[k]);
  } else {
    coeffs[0] = parse_rational(v);
  }
  return CycScalar(ctx, std::move(coeffs));
}

std::map<std::string, Coupon> parse_coupons(const FieldPtr& ctx,
                                            const json& table) {
  std::map<std::string, Coupon> out;
  if (table.is_null()) return out;
  for (auto it = table.begin(); it != table.end(); ++it) {
    const json& c = it.value();
    Coupon cp;
    for (const auto& l : c.at("source"))
      cp.source.push_back(parse_label(l.get<std::string>()));
    for (const auto& l : c.at("target"))
      cp.target.push_back(parse_label(l.get<std::string>()));
    const json& m = c.at("matrix");
    std::size_t rows = m.size();
    std::size_t cols = rows ? m[0].size() : 0;
    Matrix mat(ctx, rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      if (m[i].size() != cols)
        throw std::invalid_argument("coupon matrix: ragged rows");
      for (std::size_t j = 0; j < cols; ++j)
        mat.at(i, j) = parse_scalar(ctx, m[i][j]);
    }
    cp.matrix = mat;
    out[it.key()] = cp;
  }
  return out;
}

Diagram load_diagram(const FieldPtr& ctx, const std::string& path,
                     const std::string& coupons_path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open diagram file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();

  std::map<std::string, Coupon> coupons;
  if (!coupons_path.empty()) {
    std::ifstream cin_(coupons_path);
    if (!cin_)
      throw std::invalid_argument("cannot open coupon file: " + coupons_path);
    coupons = parse_coupons(ctx, json::parse(cin_));
  }

  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j = json::parse(text);
    std::string flat;
    for (const auto& slice : j.at("slices")) {
      if (!flat.empty()) flat += ";\n";
      if (slice.is_string()) {
        flat += slice.get<std::string>();
      } else {
        std::string line;
        for (const auto& g : slice) {
          if (!line.empty()) line += ", ";
          line += g.get<std::string>();
        }
        flat += line;
      }
    }
    if (j.contains("coupons")) {
      auto extra = parse_coupons(ctx, j["coupons"]);
      for (auto& kv : extra) coupons[kv.first] = kv.second;
    }
    return parse_diagram(flat, std::move(coupons));
  }
  return parse_diagram(text, std::move(coupons));
}

CutRef parse_cut(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("cut must look like boundary:pos");
  CutRef c;
  try {
    c.boundary = std::stoul(s.substr(0, colon));
    c.pos = std::stoul(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("cut must look like boundary:pos");
  }
  return c;
}

// first projective edge whose cut evaluation is a morphism
CutRef auto_cut(const AlgebraPtr& alg, const Diagram& d) {
  auto bounds = d.boundaries();
  for (std::size_t b = 1; b + 1 < bounds.size(); ++b) {
    for (std::size_t p = 0; p < bounds[b].size(); ++p) {
      if (!qtop::detail::label_projective(alg->r(), bounds[b][p])) continue;
      CutRef cut{b, p};
      try {
        renormalized_invariant(alg, d, cut);
        return cut;
      } catch (const std::invalid_argument& e) {
        if (std::string(e.what()).find("straightened") == std::string::npos)
          throw;
      }
    }
  }
  throw std::invalid_argument("inadmissible graph: no usable projective edge");
}

json normalization_json(const Normalization& n) {
  json out;
  out["delta_plus"] = scalar_json(n.delta_plus);
  out["delta_minus"] = scalar_json(n.delta_minus);
  out["dcal"] = scalar_json(n.dcal);
  out["delta"] = scalar_json(n.delta);
  return out;
}

// ---------------------------------------------------------------------------
// verify: structural self-checks; each check throws on failure

struct Property {
  std::string name;
  std::function<void(const AlgebraPtr&)> run;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error("check failed: " + what);
}

std::vector<Property> property_suite() {
  return {
      {"smatrix-invertible",
       [](const AlgebraPtr& alg) {
         Matrix s = smatrix(alg);  // cross-checked against the Hopf pairing
         check(s.rank() == s.rows(), "S-matrix rank");
       }},
      {"gauss-column-identity",
       [](const AlgebraPtr& alg) {
         auto ctx = alg->ctx();
         CycScalar sum = ctx->zero();
         for (long i : simple_index_set(alg->r()))
           sum += ctx->qint(i + 1) * ctx->qint(i + 1);
         CycScalar brace1 = ctx->qbrace(1);
         check(sum * brace1 * brace1 == -ctx->from_int(alg->r()),
               "sum of squared weights");
       }},
      {"quantum-dimensions",
       [](const AlgebraPtr& alg) {
         auto ctx = alg->ctx();
         for (long n = 0; n < alg->r(); ++n)
           check(qdim(simple_module(alg, n)) == ctx->qint(n + 1),
                 "qdim V" + std::to_string(n));
         for (long n = 0; n + 1 < alg->r(); ++n)
           check(qdim(projective_module(alg, n)).is_zero(),
                 "qdim P" + std::to_string(n));
       }},
      {"surgery-coefficients-semisimplified",
       [](const AlgebraPtr& alg) {
         Normalization n = ss_normalization(alg);  // internally asserted
         check(n.dcal * n.dcal == n.delta_plus * n.delta_minus, "dcal square");
       }},
      {"surgery-coefficients-renormalized",
       [](const AlgebraPtr& alg) {
         Normalization n = nss_normalization(alg);  // internally asserted
         check(n.delta * n.dcal == n.delta_plus, "anomaly");
       }},
      {"modified-trace-values",
       [](const AlgebraPtr& alg) {
         auto ctx = alg->ctx();
         long r = alg->r();
         for (long n = 0; n + 1 < r; ++n) {
           RepPtr p = projective_module(alg, n);
           Matrix id = Matrix::identity(ctx, p->dim);
           check(modified_trace(alg, p, id) == ctx->qbrace_prime(n + 1),
                 "trace of id on P" + std::to_string(n));
         }
         RepPtr st = simple_module(alg, r - 1);
         check(modified_trace(alg, st, Matrix::identity(ctx, st->dim)) ==
                   ctx->one(),
               "trace of id on the Steinberg module");
       }},
      {"sphere-invariants",
       [](const AlgebraPtr& alg) {
         Normalization ss = ss_normalization(alg);
         Normalization ns = nss_normalization(alg);
         Diagram s3 = parse_diagram("");
         check(rt_invariant(alg, s3) * ss.dcal == alg->ctx()->one(),
               "surgery invariant of the empty diagram");
         check(hennings_invariant(alg, s3) * ns.dcal == alg->ctx()->one(),
               "integral invariant of the empty diagram");
         Diagram stab = parse_diagram(
             "lcoev(red); tw+(red), id(red); rev(red)");
         check(rt_invariant(alg, stab) == rt_invariant(alg, s3),
               "stabilization");
         Diagram s2s1 = parse_diagram("lcoev(red); rev(red)");
         check(hennings_invariant(alg, s2s1).is_zero(),
               "integral invariant of the product of a sphere and a circle");
       }},
      {"renormalized-unknot",
       [](const AlgebraPtr& alg) {
         auto ctx = alg->ctx();
         Diagram d = parse_diagram("lcoev(P0); rev(P0)");
         CycScalar v = renormalized_invariant(alg, d, CutRef{1, 0});
         CycScalar expect = ctx->qbrace_prime(1) / nss_normalization(alg).dcal;
         check(v == expect, "renormalized unknot value");
       }},
      {"cutting-independence",
       [](const AlgebraPtr& alg) {
         Diagram d = parse_diagram("lcoev(P0), lcoev(P0); rev(P0), rev(P0)");
         check(cutting_independence_check(alg, d), "two unknot components");
       }},
      {"verlinde-genus-one",
       [](const AlgebraPtr& alg) {
         long r = alg->r();
         check(verlinde_dim(r, 1) == (r - 1) / 2, "genus one count");
       }},
  };
}

// ---------------------------------------------------------------------------

int classify_invalid(const std::string& msg) {
  static const char* inadmissible[] = {
      "inadmissible", "open components", "not projective", "all red",
      "not an endomorphism", "no such edge"};
  for (const char* key : inadmissible)
    if (msg.find(key) != std::string::npos) return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact quantum invariants of 3-manifolds at odd roots of unity"};
  app.require_subcommand(1);

  long r = 3;
  std::string format = "json";
  std::string diagram_path, coupons_path, cut_str;
  long genus = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--r", r, "odd root order, >= 3")
        ->check(CLI::Validator(
            [](std::string& s) -> std::string {
              long v = 0;
              try { v = std::stol(s); } catch (...) { return "not an integer"; }
              if (v < 3 || v % 2 == 0) return "must be odd and >= 3";
              return {};
            },
            "ODD"));
    sub->add_option("--format", format, "json or table")
        ->check(CLI::IsMember({"json", "table"}));
  };

  add_common(&app);  // --r / --format accepted before the subcommand too

  CLI::App* c_rt = app.add_subcommand("rt", "semisimplified surgery invariant");
  CLI::App* c_h = app.add_subcommand("hennings", "integral surgery invariant");
  CLI::App* c_lp = app.add_subcommand("lprime", "renormalized invariant");
  CLI::App* c_sm = app.add_subcommand("smatrix", "S-matrix");
  CLI::App* c_vl = app.add_subcommand("verlinde", "state space dimension");
  CLI::App* c_vf = app.add_subcommand("verify", "structural self-checks");
  CLI::App* c_tb = app.add_subcommand("tables", "reference scalars");

  for (CLI::App* sub : {c_rt, c_h, c_lp, c_sm, c_vl, c_vf, c_tb})
    add_common(sub);
  for (CLI::App* sub : {c_rt, c_h, c_lp}) {
    sub->add_option("--diagram", diagram_path, "diagram file (.tg or JSON)")
        ->required();
    sub->add_option("--coupons", coupons_path, "JSON coupon table");
  }
  c_lp->add_option("--cut", cut_str, "cut edge as boundary:pos");
  c_vl->add_option("--genus", genus, "surface genus")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    AlgebraPtr alg = SmallQuantumSl2::make(r);
    json out;
    out["r"] = r;

    if (c_rt->parsed() || c_h->parsed()) {
      Diagram d = load_diagram(alg->ctx(), diagram_path, coupons_path);
      auto data = TangleEvaluator(alg).linking_matrix(d);
      CycScalar v = c_rt->parsed() ? rt_invariant(alg, d)
                                   : hennings_invariant(alg, d);
      out["invariant"] = c_rt->parsed() ? "rt" : "hennings";
      out["components"] = data.components;
      out["signature"] = data.signature;
      out["value"] = result_scalar(v, format);
      emit(out, format);
    } else if (c_lp->parsed()) {
      Diagram d = load_diagram(alg->ctx(), diagram_path, coupons_path);
      CutRef cut = cut_str.empty() ? auto_cut(alg, d) : parse_cut(cut_str);
      CycScalar v = renormalized_invariant(alg, d, cut);
      out["invariant"] = "lprime";
      out["cut"] = std::to_string(cut.boundary) + ":" + std::to_string(cut.pos);
      out["value"] = result_scalar(v, format);
      emit(out, format);
    } else if (c_sm->parsed()) {
      Matrix s = smatrix(alg);
      out["size"] = s.rows();
      json rows = json::array();
      for (std::size_t i = 0; i < s.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < s.cols(); ++j)
          row.push_back(result_scalar(s.at(i, j), format));
        rows.push_back(row);
      }
      out["entries"] = rows;
      out["invertible"] = (s.rank() == s.rows());
      emit(out, format);
    } else if (c_vl->parsed()) {
      out["genus"] = genus;
      out["dimension"] = verlinde_dim(r, genus);
      emit(out, format);
    } else if (c_vf->parsed()) {
      bool all = true;
      json props = json::array();
      for (const auto& p : property_suite()) {
        bool ok = true;
        std::string why;
        try {
          p.run(alg);
        } catch (const std::exception& e) {
          ok = false;
          why = e.what();
          all = false;
        }
        json entry;
        entry["name"] = p.name;
        entry["pass"] = ok;
        if (!ok) entry["detail"] = why;
        props.push_back(entry);
        if (format == "table")
          std::cout << (ok ? "pass" : "FAIL") << "  " << p.name
                    << (ok ? "" : ("  " + why)) << "\n";
      }
      if (format == "json") {
        out["properties"] = props;
        out["all_pass"] = all;
        emit(out, format);
      } else {
        std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
      }
      return all ? 0 : 3;
    } else if (c_tb->parsed()) {
      auto ctx = alg->ctx();
      json qd_v = json::array(), qd_p = json::array();
      for (long n = 0; n < r; ++n)
        qd_v.push_back(result_scalar(qdim(simple_module(alg, n)), format));
      for (long n = 0; n + 1 < r; ++n)
        qd_p.push_back(result_scalar(qdim(projective_module(alg, n)), format));
      out["qdim_simple"] = qd_v;
      out["qdim_projective"] = qd_p;
      json tr;
      for (long n = 0; n + 1 < r; ++n) {
        RepPtr p = projective_module(alg, n);
        tr["P" + std::to_string(n)] = result_scalar(
            modified_trace(alg, p, Matrix::identity(ctx, p->dim)), format);
      }
      RepPtr st = simple_module(alg, r - 1);
      tr["V" + std::to_string(r - 1)] = result_scalar(
          modified_trace(alg, st, Matrix::identity(ctx, st->dim)), format);
      out["modified_trace"] = tr;
      if (format == "json") {
        out["semisimplified"] = normalization_json(ss_normalization(alg));
        out["renormalized"] = normalization_json(nss_normalization(alg));
      } else {
        Normalization ss = ss_normalization(alg);
        Normalization ns = nss_normalization(alg);
        json n;
        n["semisimplified"]["delta_plus"] = scalar_table(ss.delta_plus);
        n["semisimplified"]["delta_minus"] = scalar_table(ss.delta_minus);
        n["semisimplified"]["dcal"] = scalar_table(ss.dcal);
        n["semisimplified"]["delta"] = scalar_table(ss.delta);
        n["renormalized"]["delta_plus"] = scalar_table(ns.delta_plus);
        n["renormalized"]["delta_minus"] = scalar_table(ns.delta_minus);
        n["renormalized"]["dcal"] = scalar_table(ns.dcal);
        n["renormalized"]["delta"] = scalar_table(ns.delta);
        for (auto it = n.begin(); it != n.end(); ++it)
          out[it.key()] = it.value();
      }
      emit(out, format);
    }
    return 0;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_invalid(e.what());
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
