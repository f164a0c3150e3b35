#pragma once

// Red (surgery) strand machinery: universal bead collection along red
// components, term-assignment expansion of crossings, and cut evaluation of
// bichrome diagrams.  Included at the end of tangle.hpp.

#include <array>

namespace qtop {

namespace detail {

// Pivotal bookkeeping conventions, pinned by the calibration fixtures
// (framed unknots against the stabilization coefficients, framed
// Reidemeister pairs, handle slides).  Red strands carry no module, so the
// bead a cap or cup contributes depends only on the geometry of the passage,
// not on the lev/rev (lcoev/rcoev) flavor: a cap traversed left-to-right
// picks up K, a cup traversed left-to-right picks up K^{-1}, and the
// reversed passages contribute nothing; every closed component is finished
// with one g^{-1}.
inline int kCapFwd = 1;
inline int kCapBwd = 0;
inline int kCupFwd = -1;
inline int kCupBwd = 0;
inline int kClosingPivot = -1;

struct ArcBead {
  int endpoint;  // 0 or 1: which arc endpoint the bead sits on
  // Pivot beads feed the red traversal; CutPivot beads mark the pivotal
  // factors the flavored duality generators insert on a blue strand, counted
  // only when correcting a cut evaluation
  enum Kind { Fixed, Crossing, Pivot, CutPivot } kind = Fixed;
  std::optional<AlgElem> fixed;
  std::size_t crossing = 0;
  int leg = 0;       // tensor leg of the crossing term
  int fwd = 0, bwd = 0;  // pivot exponents per passage direction
};

struct RedSlot {
  bool is_crossing = false;
  AlgElem fixed;
  std::size_t crossing = 0;
  int leg = 0;
  bool apply_s = false;
};

struct CrossTermList {
  // expanded terms of R or R^{-1}: (leg0 monomial, leg1 monomial, coeff)
  std::vector<std::array<long, 2>> monos;
  std::vector<CycScalar> coeffs;
};

}  // namespace detail

inline TangleEvaluator::BichromeResult TangleEvaluator::run_bichrome(
    const Diagram& d, std::optional<CutRef> cut, bool keep_beads) const {
  const FieldPtr& ctx = alg_->ctx();
  const long r = alg_->r();
  auto w = detail::build_wiring(d);
  if (w.boundaries.front().size() || w.boundaries.back().size())
    throw std::invalid_argument("diagram is not closed");

  auto label_at = [&](std::size_t b, std::size_t p) -> const Label& {
    return w.boundaries[b][p];
  };

  // red components ordered by smallest port
  std::map<long, long> red_index;
  for (const auto& port : w.ports) {
    if (!label_at(port.first, port.second).is_red()) continue;
    long c = w.port_component.at(port);
    if (!red_index.count(c)) {
      long k = long(red_index.size());
      red_index[c] = k;
    }
  }
  const std::size_t ell = red_index.size();

  // arcs per generator, in creation order
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> gen_arcs;
  for (std::size_t ai = 0; ai < w.arcs.size(); ++ai)
    gen_arcs[{w.arcs[ai].slice, w.arcs[ai].gen}].push_back(ai);

  // scan generators: bead placement, red crossings, blue patches
  std::map<std::size_t, std::vector<detail::ArcBead>> arc_beads;
  std::vector<detail::CrossTermList> crossings;
  // bichrome crossings: (slice, gen) -> (crossing index, blue leg is a?, which
  // tensor leg the blue strand receives)
  struct BluePatch { std::size_t crossing; bool blue_is_a; int blue_leg; };
  std::map<std::pair<std::size_t, std::size_t>, BluePatch> patches;
  bool any_blue = false;

  auto term_list = [&](bool positive) {
    detail::CrossTermList out;
    const TensorElem& R = positive ? alg_->r_matrix() : alg_->r_matrix_inv();
    for (const auto& [k, c] : R.terms()) {
      out.monos.push_back({k[0], k[1]});
      out.coeffs.push_back(c);
    }
    return out;
  };

  for (std::size_t s = 0; s < d.slices.size(); ++s) {
    for (std::size_t gi = 0; gi < d.slices[s].size(); ++gi) {
      const Generator& g = d.slices[s][gi];
      bool a_red = g.a.is_red(), b_red = g.b.is_red();
      switch (g.type) {
        case Generator::Type::Lev:
        case Generator::Type::Rev: {
          if (a_red) {
            // red caps are flavor blind: the bead depends on the passage
            // geometry only (endpoint 0 upward = left-to-right over the top)
            detail::ArcBead pb;
            pb.endpoint = 0;
            pb.kind = detail::ArcBead::Pivot;
            pb.fwd = detail::kCapFwd;
            pb.bwd = detail::kCapBwd;
            arc_beads[gen_arcs[{s, gi}][0]].push_back(pb);
          } else {
            any_blue = true;
            if (g.type == Generator::Type::Rev) {
              // rev inserts K on its module leg; a cut traversal counts it
              // as S(K) when the passage runs downward
              detail::ArcBead pb;
              pb.endpoint = 0;
              pb.kind = detail::ArcBead::CutPivot;
              pb.fwd = 1;
              pb.bwd = -1;
              arc_beads[gen_arcs[{s, gi}][0]].push_back(pb);
            }
          }
          break;
        }
        case Generator::Type::Lcoev:
        case Generator::Type::Rcoev: {
          if (a_red) {
            detail::ArcBead pb;
            pb.endpoint = 1;
            pb.kind = detail::ArcBead::Pivot;
            pb.fwd = detail::kCupFwd;
            pb.bwd = detail::kCupBwd;
            arc_beads[gen_arcs[{s, gi}][0]].push_back(pb);
          } else {
            any_blue = true;
            if (g.type == Generator::Type::Rcoev) {
              // rcoev inserts K^{-1} on its module leg
              detail::ArcBead pb;
              pb.endpoint = 1;
              pb.kind = detail::ArcBead::CutPivot;
              pb.fwd = -1;
              pb.bwd = 1;
              arc_beads[gen_arcs[{s, gi}][0]].push_back(pb);
            }
          }
          break;
        }
        case Generator::Type::TwPos:
        case Generator::Type::TwNeg:
          if (a_red) {
            detail::ArcBead tb;
            tb.endpoint = 0;
            tb.kind = detail::ArcBead::Fixed;
            tb.fixed = g.type == Generator::Type::TwPos ? alg_->ribbon_inv()
                                                        : alg_->ribbon();
            arc_beads[gen_arcs[{s, gi}][0]].push_back(tb);
          } else {
            any_blue = true;
          }
          break;
        case Generator::Type::XPos:
        case Generator::Type::XNeg: {
          bool positive = g.type == Generator::Type::XPos;
          if (!a_red && !b_red) { any_blue = true; break; }
          std::size_t ci = crossings.size();
          crossings.push_back(term_list(positive));
          // bottom-left strand receives tensor leg 0 of an R term and leg 1
          // of an R^{-1} term; bottom-right the other leg
          int left_leg = positive ? 0 : 1;
          const auto& arcs = gen_arcs[{s, gi}];  // [0]=bottom-left, [1]=bottom-right
          if (a_red) {
            detail::ArcBead cb;
            cb.endpoint = 0;
            cb.kind = detail::ArcBead::Crossing;
            cb.crossing = ci;
            cb.leg = left_leg;
            arc_beads[arcs[0]].push_back(cb);
          }
          if (b_red) {
            detail::ArcBead cb;
            cb.endpoint = 0;
            cb.kind = detail::ArcBead::Crossing;
            cb.crossing = ci;
            cb.leg = 1 - left_leg;
            arc_beads[arcs[1]].push_back(cb);
          }
          if (a_red != b_red) {
            any_blue = true;
            patches[{s, gi}] = BluePatch{ci, !a_red, a_red ? 1 - left_leg : left_leg};
          }
          break;
        }
        default:
          if (!a_red && g.type != Generator::Type::Coupon) any_blue = true;
          if (g.type == Generator::Type::Coupon) any_blue = true;
          break;
      }
    }
  }

  // ---- traversals ----------------------------------------------------------
  // walk a closed strand starting at `start` heading up; report each bead with
  // its antipode flag (downward passage), in traversal order
  auto traverse = [&](std::pair<std::size_t, std::size_t> start,
                      auto&& on_bead) {
    auto port = start;
    bool up = true;
    do {
      // pick the adjacent arc: heading up enters an in-leg of the generator
      // above, heading down enters an out-leg of the generator below
      auto adj_it = w.at_port.find(port);
      if (adj_it == w.at_port.end())
        throw std::invalid_argument("inadmissible graph: strand ends at a coupon");
      const auto& adj = adj_it->second;
      long arc_idx = -1;
      int entry = -1;
      for (auto ai : adj) {
        const detail::Arc& a = w.arcs[ai];
        if (a.b0 == port.first && a.p0 == port.second && a.in0 == up) {
          arc_idx = long(ai); entry = 0;
        } else if (a.b1 == port.first && a.p1 == port.second && a.in1 == up) {
          arc_idx = long(ai); entry = 1;
        }
      }
      if (arc_idx < 0)
        throw std::invalid_argument("inadmissible graph: open or coupon-interrupted strand");
      const detail::Arc& a = w.arcs[std::size_t(arc_idx)];
      int exit = 1 - entry;
      bool exit_in = exit == 0 ? a.in0 : a.in1;
      auto it = arc_beads.find(std::size_t(arc_idx));
      if (it != arc_beads.end()) {
        for (const auto& bead : it->second) {
          bool leg_in = bead.endpoint == 0 ? a.in0 : a.in1;
          // the passage at the bead's leg runs upward exactly when the leg is
          // an in-leg being entered or an out-leg being exited
          bool upward = (bead.endpoint == entry) == leg_in;
          on_bead(bead, !upward);
        }
      }
      port = exit == 0 ? std::make_pair(a.b0, a.p0) : std::make_pair(a.b1, a.p1);
      up = !exit_in;
    } while (!(port == start && up));
  };

  // red component slot lists, ordered by smallest port
  std::vector<std::vector<detail::RedSlot>> comp_slots(ell);
  {
    std::vector<bool> seen(ell, false);
    for (const auto& port : w.ports) {
      if (!label_at(port.first, port.second).is_red()) continue;
      long k = red_index.at(w.port_component.at(port));
      if (seen[k]) continue;
      seen[k] = true;
      traverse(port, [&](const detail::ArcBead& bead, bool down) {
        detail::RedSlot slot;
        switch (bead.kind) {
          case detail::ArcBead::Pivot: {
            int e = down ? bead.bwd : bead.fwd;
            if (e == 0) return;
            slot.fixed = alg_->K(e);
            break;
          }
          case detail::ArcBead::Fixed:
            slot.fixed = *bead.fixed;
            slot.apply_s = down;
            break;
          case detail::ArcBead::Crossing:
            slot.is_crossing = true;
            slot.crossing = bead.crossing;
            slot.leg = bead.leg;
            slot.apply_s = down;
            break;
          case detail::ArcBead::CutPivot:
            return;  // blue-strand bookkeeping only
        }
        comp_slots[k].push_back(slot);
      });
    }
  }

  // ---- cut preparation -----------------------------------------------------
  std::size_t cut_pre = 1, cut_dim = 1, cut_post = 1;
  RepPtr cut_rep;
  int pivot_count = 0;
  if (cut) {
    if (cut->boundary == 0 || cut->boundary >= w.boundaries.size())
      throw std::invalid_argument("inadmissible cut: no such edge");
    const auto& bnd = w.boundaries[cut->boundary];
    if (cut->pos >= bnd.size())
      throw std::invalid_argument("inadmissible cut: no such edge");
    const Label& cl = bnd[cut->pos];
    bool projective = cl.kind == Label::Kind::Proj ||
                      (cl.kind == Label::Kind::Simple && cl.n == r - 1);
    if (!projective) throw std::invalid_argument("inadmissible cut: edge is not projective");
    cut_rep = resolve(cl);
    cut_dim = cut_rep->dim;
    for (std::size_t p = 0; p < bnd.size(); ++p) {
      std::size_t dim = bnd[p].is_red() ? 1 : resolve(bnd[p])->dim;
      if (p < cut->pos) cut_pre *= dim;
      else if (p > cut->pos) cut_post *= dim;
    }
    // net pivotal power picked up along the cut strand
    traverse({cut->boundary, cut->pos}, [&](const detail::ArcBead& bead, bool down) {
      if (bead.kind == detail::ArcBead::CutPivot)
        pivot_count += down ? bead.bwd : bead.fwd;
    });
  }

  // ---- per-assignment blue machinery ----------------------------------------
  std::vector<Matrix> base_gen;  // flattened unpatched generator matrices
  std::vector<std::vector<std::size_t>> gen_of_slice(d.slices.size());
  std::vector<bool> slice_patched(d.slices.size(), false);
  auto red_dim_matrix = [&]() { return Matrix::identity(ctx, 1); };
  for (std::size_t s = 0; s < d.slices.size(); ++s) {
    for (std::size_t gi = 0; gi < d.slices[s].size(); ++gi) {
      const Generator& g = d.slices[s][gi];
      gen_of_slice[s].push_back(base_gen.size());
      if (patches.count({s, gi})) {
        slice_patched[s] = true;
        base_gen.push_back(red_dim_matrix());  // placeholder
      } else if (g.a.is_red() && g.type != Generator::Type::Coupon) {
        base_gen.push_back(red_dim_matrix());
      } else {
        base_gen.push_back(generator_matrix(g, d.coupons));
      }
    }
  }
  std::map<std::pair<std::size_t, long>, Matrix> leg_cache;  // (gen flat idx, mono)
  auto patched_matrix = [&](std::size_t s, std::size_t gi,
                            const std::vector<std::size_t>& assign) -> const Matrix& {
    const BluePatch& bp = patches.at({s, gi});
    long mono = crossings[bp.crossing].monos[assign[bp.crossing]][bp.blue_leg];
    std::size_t flat = gen_of_slice[s][gi];
    auto key = std::make_pair(flat, mono);
    auto it = leg_cache.find(key);
    if (it != leg_cache.end()) return it->second;
    const Generator& g = d.slices[s][gi];
    const Label& blue = bp.blue_is_a ? g.a : g.b;
    Matrix m = rep_action(alg_, resolve(blue), alg_->pbw(mono));
    return leg_cache.emplace(key, std::move(m)).first->second;
  };

  std::vector<Matrix> base_slice(d.slices.size(), Matrix::identity(ctx, 1));
  for (std::size_t s = 0; s < d.slices.size(); ++s) {
    if (slice_patched[s]) continue;
    Matrix m = Matrix::identity(ctx, 1);
    for (std::size_t gi = 0; gi < d.slices[s].size(); ++gi)
      m = m.kron(base_gen[gen_of_slice[s][gi]]);
    base_slice[s] = std::move(m);
  }

  auto blue_pass = [&](const std::vector<std::size_t>& assign,
                       Matrix* m_out) -> CycScalar {
    // returns the closed value; with a cut, accumulates nothing and instead
    // fills *m_out with the rest-matrix for this assignment
    std::vector<Matrix> slices;
    slices.reserve(d.slices.size());
    for (std::size_t s = 0; s < d.slices.size(); ++s) {
      if (!slice_patched[s]) { slices.push_back(base_slice[s]); continue; }
      Matrix m = Matrix::identity(ctx, 1);
      for (std::size_t gi = 0; gi < d.slices[s].size(); ++gi) {
        if (patches.count({s, gi})) m = m.kron(patched_matrix(s, gi, assign));
        else m = m.kron(base_gen[gen_of_slice[s][gi]]);
      }
      slices.push_back(std::move(m));
    }
    if (!cut) {
      Matrix acc = Matrix::identity(ctx, 1);
      for (auto& m : slices) acc = m * acc;
      return acc.at(0, 0);
    }
    Matrix b = Matrix::identity(ctx, 1);
    for (std::size_t s = 0; s < cut->boundary; ++s) b = slices[s] * b;
    Matrix a = slices[cut->boundary];
    for (std::size_t s = cut->boundary + 1; s < d.slices.size(); ++s)
      a = slices[s] * a;
    Matrix m(ctx, cut_dim, cut_dim);
    for (std::size_t i = 0; i < cut_dim; ++i)
      for (std::size_t j = 0; j < cut_dim; ++j) {
        CycScalar acc = ctx->zero();
        for (std::size_t u = 0; u < cut_pre; ++u)
          for (std::size_t v = 0; v < cut_post; ++v) {
            std::size_t col_a = (u * cut_dim + j) * cut_post + v;
            std::size_t row_b = (u * cut_dim + i) * cut_post + v;
            acc += a.at(0, col_a) * b.at(row_b, 0);
          }
        m.at(i, j) = acc;
      }
    *m_out = std::move(m);
    return ctx->zero();
  };

  // ---- assignment loop -------------------------------------------------------
  BichromeResult out{ctx->zero(), Matrix(ctx, 0, 0), TensorElem(ctx, ell ? ell : 1)};
  Matrix m_total = cut ? Matrix(ctx, cut_dim, cut_dim) : Matrix(ctx, 0, 0);
  const AlgElem closing = alg_->K(detail::kClosingPivot);

  std::vector<std::size_t> assign(crossings.size(), 0);
  for (;;) {
    CycScalar coeff = ctx->one();
    for (std::size_t c = 0; c < crossings.size(); ++c)
      coeff *= crossings[c].coeffs[assign[c]];

    // red component elements for this assignment
    std::vector<AlgElem> reds;
    reds.reserve(ell);
    bool dead = false;
    for (std::size_t k = 0; k < ell && !dead; ++k) {
      AlgElem wprod = alg_->unit();
      for (const auto& slot : comp_slots[k]) {
        AlgElem b = slot.is_crossing
                        ? alg_->pbw(crossings[slot.crossing].monos[assign[slot.crossing]][slot.leg])
                        : slot.fixed;
        if (slot.apply_s) b = alg_->antipode(b);
        wprod = alg_->multiply(b, wprod);
      }
      wprod = alg_->multiply(closing, wprod);
      if (keep_beads) {
        reds.push_back(std::move(wprod));
      } else {
        CycScalar lam = alg_->integral_lambda(wprod);
        if (lam.is_zero()) dead = true;
        else coeff *= lam;
      }
    }

    if (!dead) {
      if (keep_beads) {
        // expand the tensor product of the component elements
        std::vector<std::vector<std::pair<long, CycScalar>>> lists(ell);
        for (std::size_t k = 0; k < ell; ++k)
          for (const auto& [m, c] : reds[k].terms()) lists[k].push_back({m, c});
        std::vector<std::size_t> pick(ell, 0);
        bool empty = false;
        for (std::size_t k = 0; k < ell; ++k) empty |= lists[k].empty();
        if (!empty) {
          for (;;) {
            std::vector<long> key(ell);
            CycScalar c = coeff;
            for (std::size_t k = 0; k < ell; ++k) {
              key[k] = lists[k][pick[k]].first;
              c *= lists[k][pick[k]].second;
            }
            out.beads.add_term(key, c);
            std::size_t k = 0;
            while (k < ell && ++pick[k] == lists[k].size()) pick[k++] = 0;
            if (k == ell) break;
          }
        }
      } else if (cut) {
        Matrix m(ctx, 0, 0);
        blue_pass(assign, &m);
        m_total = m_total + m.scaled(coeff);
      } else {
        CycScalar v = any_blue ? blue_pass(assign, nullptr) : ctx->one();
        out.scalar += coeff * v;
      }
    }

    std::size_t c = 0;
    while (c < crossings.size() && ++assign[c] == crossings[c].monos.size())
      assign[c++] = 0;
    if (c == crossings.size()) break;
    if (crossings.empty()) break;
  }

  if (cut) {
    // strip the pivotal power the closure arc contributed
    Matrix corr = Matrix::identity(ctx, cut_dim);
    Matrix k = pivot_count >= 0 ? cut_rep->actK.inverse() : cut_rep->actK;
    for (int t = 0; t < std::abs(pivot_count); ++t) corr = corr * k;
    out.endo = corr * m_total;
    // an interior edge cannot be straightened to the tangle boundary without
    // extra crossings; such a cut does not present the diagram as a closure
    if (out.endo * cut_rep->actE != cut_rep->actE * out.endo ||
        out.endo * cut_rep->actF != cut_rep->actF * out.endo ||
        out.endo * cut_rep->actK != cut_rep->actK * out.endo)
      throw std::invalid_argument(
          "inadmissible cut: edge cannot be straightened to the boundary");
  }
  return out;
}

}  // namespace qtop
