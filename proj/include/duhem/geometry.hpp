#ifndef DUHEM_GEOMETRY_HPP
#define DUHEM_GEOMETRY_HPP

#include "accommodation.hpp"
#include "errors.hpp"
#include "integrator.hpp"
#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace duhem {

/// Crossing between the ascending and descending branches of an orbit.
struct IntersectionPoint {
    double v;
    double g;
    std::size_t ascending_index;  // segment [i, i+1] of the ascending polyline
    std::size_t descending_index; // segment [j, j+1] of the descending polyline
    double ascending_param;       // position along the segment, in [0, 1]
    double descending_param;
};

struct IntersectionOptions {
    double parallel_tol = 1e-12; // |cross product| at or below this is a tangential contact
    double dedup_tol = 1e-6;
};

struct CrossingSet {
    std::vector<IntersectionPoint> points;
    std::size_t tangential_contacts = 0;
};

namespace detail {

inline double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

/// Segment/segment intersection. Returns nullopt for disjoint or near-parallel pairs;
/// `parallel` is set for the latter when the segments are within reach of each other.
inline std::optional<IntersectionPoint> segment_crossing(const BranchSample& p0, const BranchSample& p1,
                                                         const BranchSample& q0, const BranchSample& q1,
                                                         double parallel_tol, bool& parallel) {
    const double rx = p1.v - p0.v, ry = p1.g - p0.g;
    const double sx = q1.v - q0.v, sy = q1.g - q0.g;
    const double denom = cross(rx, ry, sx, sy);
    const double qpx = q0.v - p0.v, qpy = q0.g - p0.g;
    if (std::abs(denom) <= parallel_tol) {
        parallel = std::abs(cross(qpx, qpy, rx, ry)) <= parallel_tol;
        return std::nullopt;
    }
    const double t = cross(qpx, qpy, sx, sy) / denom;
    const double u = cross(qpx, qpy, rx, ry) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return IntersectionPoint{p0.v + t * rx, p0.g + t * ry, 0, 0, t, u};
}

inline void sort_and_dedup(std::vector<IntersectionPoint>& pts, double tol) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.v < b.v; });
    std::vector<IntersectionPoint> out;
    for (const auto& p : pts) {
        if (!out.empty() && std::abs(p.v - out.back().v) <= tol && std::abs(p.g - out.back().g) <= tol) continue;
        out.push_back(p);
    }
    pts = std::move(out);
}

} // namespace detail

/// All crossings between two polylines that are strictly monotone in v
/// (either direction). Only segment pairs whose v-ranges overlap are tested.
inline CrossingSet polyline_crossings(std::span<const BranchSample> a, std::span<const BranchSample> b,
                                      const IntersectionOptions& opts = {}) {
    CrossingSet out;
    if (a.size() < 2 || b.size() < 2) return out;
    // Work on b in increasing-v order, remembering the original indexing.
    const bool b_inc = b[1].v > b[0].v;
    const std::size_t nb = b.size();
    auto b_at = [&](std::size_t k) -> const BranchSample& { return b_inc ? b[k] : b[nb - 1 - k]; };
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const double lo = std::min(a[i].v, a[i + 1].v), hi = std::max(a[i].v, a[i + 1].v);
        // First increasing-order segment [k, k+1] whose right end reaches lo.
        std::size_t first = 0, last = nb - 1;
        while (first < last) {
            const std::size_t mid = (first + last) / 2;
            if (b_at(mid + 1).v < lo) first = mid + 1;
            else last = mid;
        }
        for (std::size_t k = first; k + 1 < nb && b_at(k).v <= hi; ++k) {
            const auto& q0 = b_at(k);
            const auto& q1 = b_at(k + 1);
            bool parallel = false;
            // Keep b's own orientation so the parameter refers to its original segment.
            auto hit = b_inc ? detail::segment_crossing(a[i], a[i + 1], q0, q1, opts.parallel_tol, parallel)
                             : detail::segment_crossing(a[i], a[i + 1], q1, q0, opts.parallel_tol, parallel);
            if (parallel) ++out.tangential_contacts;
            if (!hit) continue;
            hit->ascending_index = i;
            hit->descending_index = b_inc ? k : nb - 2 - k;
            out.points.push_back(*hit);
        }
    }
    detail::sort_and_dedup(out.points, opts.dedup_tol);
    return out;
}

namespace detail {

inline void require_orbit(const ClosedOrbit& orbit) {
    if (orbit.ascending.samples.size() < 2 || orbit.descending.samples.size() < 2) {
        throw DegenerateOrbit("orbit branches need at least two samples each");
    }
}

inline double end_margin(const ClosedOrbit& orbit) {
    double h = 0.0;
    for (const auto* tr : {&orbit.ascending, &orbit.descending}) {
        for (std::size_t i = 0; i + 1 < tr->samples.size(); ++i) {
            h = std::max(h, std::abs(tr->samples[i + 1].v - tr->samples[i].v));
        }
    }
    return 1.5 * h;
}

} // namespace detail

/// Interior crossings of the orbit's two branches. The shared turning points at
/// u_min and u_max (within 1.5 grid steps) are closure, not self-intersection.
inline CrossingSet orbit_crossings(const ClosedOrbit& orbit, const IntersectionOptions& opts = {}) {
    detail::require_orbit(orbit);
    auto all = polyline_crossings(orbit.ascending.samples, orbit.descending.samples, opts);
    const double lo = orbit.ascending.front().v, hi = orbit.ascending.back().v;
    const double margin = detail::end_margin(orbit);
    std::erase_if(all.points, [&](const IntersectionPoint& p) { return p.v - lo <= margin || hi - p.v <= margin; });
    return all;
}

inline std::vector<IntersectionPoint> self_intersections(const ClosedOrbit& orbit,
                                                         const IntersectionOptions& opts = {}) {
    return orbit_crossings(orbit, opts).points;
}

enum class Orientation { clockwise, counterclockwise };

struct Lobe {
    std::vector<BranchSample> vertices; // closed implicitly (last connects to first)
    double signed_area;                 // shoelace, counterclockwise positive
    Orientation orientation;
};

namespace detail {

struct AreaAccumulator {
    double ref_v;
    double ref_g;
    double sum = 0.0;

    void edge(const BranchSample& a, const BranchSample& b) {
        sum += cross(a.v - ref_v, a.g - ref_g, b.v - ref_v, b.g - ref_g);
    }
};

inline double polygon_area(std::span<const BranchSample> poly, double ref_v, double ref_g) {
    AreaAccumulator acc{ref_v, ref_g};
    for (std::size_t i = 0; i < poly.size(); ++i) acc.edge(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * acc.sum;
}

} // namespace detail

/// Shoelace area of the closed curve ascending-then-descending.
inline double orbit_signed_area(const ClosedOrbit& orbit) {
    std::vector<BranchSample> poly(orbit.ascending.samples);
    poly.insert(poly.end(), orbit.descending.samples.begin(), orbit.descending.samples.end());
    const auto& ref = orbit.ascending.front();
    return detail::polygon_area(poly, ref.v, ref.g);
}

/// Splits the orbit at its self-intersections into closed sub-loops.
/// Lobe k is bounded by consecutive cut points along v; the first and last cuts
/// are the turning points at u_min and u_max.
inline std::vector<Lobe> decompose_lobes(const ClosedOrbit& orbit, std::span<const IntersectionPoint> xs) {
    detail::require_orbit(orbit);
    const auto& asc = orbit.ascending.samples;
    const auto& desc = orbit.descending.samples;

    struct Cut {
        std::size_t asc_idx;  // last ascending vertex before the cut
        std::size_t desc_idx; // last descending vertex before the cut
        double asc_param;
        double desc_param;
        BranchSample point;
    };
    std::vector<Cut> cuts;
    cuts.push_back({0, desc.size() - 1, 0.0, 1.0, asc.front()});
    for (const auto& x : xs) {
        cuts.push_back({x.ascending_index, x.descending_index, x.ascending_param, x.descending_param, {x.v, x.g}});
    }
    cuts.push_back({asc.size() - 1, 0, 1.0, 0.0, desc.front()});

    for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
        const auto& p = cuts[k - 1];
        const auto& c = cuts[k];
        const bool asc_order = c.asc_idx > p.asc_idx || (c.asc_idx == p.asc_idx && c.asc_param >= p.asc_param);
        const bool desc_order =
            c.desc_idx < p.desc_idx || (c.desc_idx == p.desc_idx && c.desc_param <= p.desc_param) || k == 1;
        if (!asc_order || !desc_order) {
            throw InconsistentTopology("intersection order along the branches is not consistent");
        }
        if (c.asc_idx >= asc.size() - 1 || c.desc_idx >= desc.size() - 1) {
            throw InconsistentTopology("intersection refers to a segment outside the orbit");
        }
    }

    const auto& ref = asc.front();
    std::vector<Lobe> lobes;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const auto& a = cuts[k];
        const auto& b = cuts[k + 1];
        std::vector<BranchSample> poly{a.point};
        for (std::size_t i = a.asc_idx + 1; i <= b.asc_idx && i < asc.size(); ++i) poly.push_back(asc[i]);
        poly.push_back(b.point);
        for (std::size_t j = b.desc_idx + 1; j <= a.desc_idx && j < desc.size(); ++j) poly.push_back(desc[j]);
        const double area = detail::polygon_area(poly, ref.v, ref.g);
        lobes.push_back({std::move(poly), area, area > 0.0 ? Orientation::counterclockwise : Orientation::clockwise});
    }
    return lobes;
}

enum class LoopClass { simple_cw, simple_ccw, butterfly, multi_loop, degenerate };

struct LoopAnalysis {
    LoopClass loop_class = LoopClass::degenerate;
    std::vector<IntersectionPoint> intersections;
    std::vector<Lobe> lobes;
    double signed_area = 0.0;
    double enclosed_area = 0.0; // sum of |lobe area|
    double area_tolerance = 0.0;
    std::size_t tangential_contacts = 0;
};

inline LoopAnalysis analyze_loop(const ClosedOrbit& orbit, const IntersectionOptions& opts = {}) {
    LoopAnalysis out;
    if (orbit.ascending.samples.size() < 2 || orbit.descending.samples.size() < 2) return out;
    const double in_span = orbit.ascending.back().v - orbit.ascending.front().v;
    double g_lo = orbit.ascending.front().g, g_hi = g_lo;
    for (const auto* tr : {&orbit.ascending, &orbit.descending}) {
        for (const auto& s : tr->samples) {
            g_lo = std::min(g_lo, s.g);
            g_hi = std::max(g_hi, s.g);
        }
    }
    out.area_tolerance = 1e-9 * std::abs(in_span) * (g_hi - g_lo);
    const auto crossings = orbit_crossings(orbit, opts);
    out.intersections = crossings.points;
    out.tangential_contacts = crossings.tangential_contacts;
    out.lobes = decompose_lobes(orbit, out.intersections);
    out.signed_area = orbit_signed_area(orbit);
    for (const auto& l : out.lobes) out.enclosed_area += std::abs(l.signed_area);

    if (!(out.enclosed_area > out.area_tolerance)) {
        out.loop_class = LoopClass::degenerate;
    } else if (out.intersections.empty()) {
        out.loop_class = out.signed_area > 0.0 ? LoopClass::simple_ccw : LoopClass::simple_cw;
    } else if (out.intersections.size() == 1 && out.lobes.size() == 2 &&
               out.lobes[0].orientation != out.lobes[1].orientation) {
        out.loop_class = LoopClass::butterfly;
    } else {
        // Two or more crossings. A single crossing joining equally oriented lobes also lands here.
        out.loop_class = LoopClass::multi_loop;
    }
    return out;
}

inline LoopClass classify_loop(const ClosedOrbit& orbit) { return analyze_loop(orbit).loop_class; }

// ---------------------------------------------------------------------------
// Butterfly construction and invariance checks (curve-chasing models only)
// ---------------------------------------------------------------------------

struct ButterflyOptions {
    double search_span = 30.0;         // working interval is [v_a+ - span, v_a+ + span]
    double epsilon_floor = 1e-9;
    std::size_t slope_samples = 4097;
};

struct ButterflyConstruction {
    double v_a_plus;  // seed on c1
    double v_b_plus;  // backward crossing of the rising branch with c2
    double v_c_plus;  // forward crossing of the rising branch with c2
    double epsilon;
    double v_a_minus; // seed on c2, v_c_plus + epsilon
    double v_b_minus; // forward (reverse-time) crossing of the falling branch with c1
    double v_x;
    double v_min;
    double v_max;
    double residual_x;   // |Y+ - Y-| at the three crossings
    double residual_min;
    double residual_max;

    bool ordered() const { return v_min < v_a_plus && v_a_plus < v_x && v_x < v_a_minus && v_a_minus < v_max; }
    double max_residual() const { return std::max({residual_x, residual_min, residual_max}); }
};

namespace detail {

inline const CurveChasing& require_curve_chasing(const DuhemModel& m) {
    const auto* cc = m.curve_chasing_params();
    if (!cc) throw HypothesisViolated("construction requires a curve-chasing model");
    return *cc;
}

/// Trajectory through one seed point, covering an interval on both sides of it.
struct TwoSidedBranch {
    const DuhemModel* model;
    BranchTrajectory left;  // seed -> lower end
    BranchTrajectory right; // seed -> upper end

    double lo() const { return left.back().v; }
    double hi() const { return right.back().v; }
    double operator()(double v) const {
        return v <= left.front().v ? value_at(*model, left, v) : value_at(*model, right, v);
    }
};

inline TwoSidedBranch two_sided(const DuhemModel& m, Branch b, double seed_v, double seed_g, double lo, double hi,
                                double h) {
    return {&m, sweep(m, b, seed_v, lo, seed_g, h), sweep(m, b, seed_v, hi, seed_g, h)};
}

/// Sign change of D = P - M inside (a, b), sampled at spacing h and refined by bisection.
/// Scans from `a` toward `b` (either order) and returns the first root met.
inline std::optional<double> first_root(const TwoSidedBranch& P, const TwoSidedBranch& M, double a, double b,
                                        double h) {
    auto D = [&](double v) { return P(v) - M(v); };
    const double dir = b > a ? 1.0 : -1.0;
    const std::size_t n = step_count(b - a, h);
    double x0 = a, d0 = D(a);
    for (std::size_t k = 1; k <= n; ++k) {
        const double x1 = k == n ? b : a + dir * static_cast<double>(k) * h;
        const double d1 = D(x1);
        if (std::signbit(d0) != std::signbit(d1) && d0 != 0.0) {
            if (d1 == 0.0 && k == n) return std::nullopt; // touches only at the far end
            double lo = x0, hi = x1, dlo = d0;
            for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double dm = D(mid);
                if (dm == 0.0) return mid;
                if (std::signbit(dm) == std::signbit(dlo)) {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            if (root == a || root == b) return std::nullopt;
            return root;
        }
        x0 = x1;
        d0 = d1;
    }
    return std::nullopt;
}

} // namespace detail

/// First crossing, scanning right from v_a+, of the rising branch seeded on c1 at v_a+
/// and the falling branch seeded on c2 at v_a-.
inline std::optional<double> butterfly_inner_crossing(const DuhemModel& m, double v_a_plus, double v_a_minus,
                                                      double h) {
    const auto& cc = detail::require_curve_chasing(m);
    if (!(v_a_plus < v_a_minus)) throw InvalidArgument("butterfly_inner_crossing: seeds out of order");
    const auto P = detail::two_sided(m, Branch::ascending, v_a_plus, cc.c1(v_a_plus), v_a_plus, v_a_minus, h);
    const auto M = detail::two_sided(m, Branch::descending, v_a_minus, cc.c2(v_a_minus), v_a_plus, v_a_minus, h);
    return detail::first_root(P, M, v_a_plus, v_a_minus, h);
}

/// Builds the three crossings of a rising branch seeded on c1 at v_a+ and a falling
/// branch seeded on c2 at v_a- = v_c+ + epsilon, shrinking epsilon until the inner
/// crossing appears.
inline ButterflyConstruction construct_butterfly(const DuhemModel& m, double v_a_plus, double epsilon0, double h,
                                                 const ButterflyOptions& opts = {}) {
    const auto& cc = detail::require_curve_chasing(m);
    if (!(epsilon0 > 0.0) || !(h > 0.0)) throw InvalidArgument("construct_butterfly: epsilon0 and h must be positive");
    const double lo = v_a_plus - opts.search_span, hi = v_a_plus + opts.search_span;

    if (slope_range(cc.c1, lo, hi, opts.slope_samples).min < 0.0) {
        throw HypothesisViolated("dc1/dv < 0 somewhere on the working interval");
    }
    if (slope_range(cc.c2, lo, hi, opts.slope_samples).max > 0.0) {
        throw HypothesisViolated("dc2/dv > 0 somewhere on the working interval");
    }
    if (!(cc.c1(v_a_plus) < cc.c2(v_a_plus))) {
        throw HypothesisViolated("c1 must lie below c2 at the seed (no c1 = c2 crossing to its right)");
    }
    {
        bool meets = false;
        for (double v : linspace(v_a_plus, hi, opts.slope_samples)) {
            if (cc.c1(v) >= cc.c2(v)) {
                meets = true;
                break;
            }
        }
        if (!meets) throw HypothesisViolated("c1 and c2 do not meet to the right of the seed");
    }

    ButterflyConstruction out{};
    out.v_a_plus = v_a_plus;
    const double g_a = cc.c1(v_a_plus);
    const auto b_plus = extend_to_crossing(m, Branch::ascending, v_a_plus, g_a, cc.c2, CrossingDirection::backward, lo, h);
    if (!b_plus) throw HypothesisViolated("rising branch does not reach c2 when extended backward");
    const auto c_plus = extend_to_crossing(m, Branch::ascending, v_a_plus, g_a, cc.c2, CrossingDirection::forward, hi, h);
    if (!c_plus) throw HypothesisViolated("rising branch does not reach c2 going forward");
    out.v_b_plus = b_plus->v;
    out.v_c_plus = c_plus->v;

    for (double eps = epsilon0; eps >= opts.epsilon_floor; eps *= 0.5) {
        const double v_a_minus = out.v_c_plus + eps;
        const double z_a = cc.c2(v_a_minus);
        const auto b_minus = extend_to_crossing(m, Branch::descending, v_a_minus, z_a, cc.c1,
                                                CrossingDirection::forward, v_a_minus + opts.search_span, h);
        if (!b_minus) throw HypothesisViolated("falling branch does not reach c1 when extended backward in time");

        const auto P = detail::two_sided(m, Branch::ascending, v_a_plus, g_a, out.v_b_plus, b_minus->v, h);
        const auto M = detail::two_sided(m, Branch::descending, v_a_minus, z_a, out.v_b_plus, b_minus->v, h);
        const auto v_x = detail::first_root(P, M, v_a_plus, v_a_minus, h);
        if (!v_x) continue;

        out.epsilon = eps;
        out.v_a_minus = v_a_minus;
        out.v_b_minus = b_minus->v;
        out.v_x = *v_x;
        const auto v_max = detail::first_root(P, M, v_a_minus, out.v_b_minus, h);
        const auto v_min = detail::first_root(P, M, v_a_plus, out.v_b_plus, h);
        if (!v_max || !v_min) throw HypothesisViolated("outer crossings of the two branches not found");
        out.v_max = *v_max;
        out.v_min = *v_min;
        out.residual_x = std::abs(P(out.v_x) - M(out.v_x));
        out.residual_min = std::abs(P(out.v_min) - M(out.v_min));
        out.residual_max = std::abs(P(out.v_max) - M(out.v_max));
        return out;
    }
    throw EpsilonExhausted("no inner crossing found before epsilon reached its floor");
}

struct InvarianceReport {
    bool applicable = true;
    bool pass = true;
    double worst_violation = 0.0; // max of g(v) - c(v) over the sweeps
    double witness_v = 0.0;
    std::size_t seeds_checked = 0;
    std::size_t seeds_skipped = 0; // seeds above the curve are outside the statement
};

inline constexpr double invariance_tolerance = 1e-7;

/// Seeds trajectories at c(v_from) + offset (offset <= 0) and checks they stay on or
/// below the branch's zero level curve: rising branch forward, falling branch backward.
inline InvarianceReport verify_invariance(const DuhemModel& m, Branch b, double v_from, double v_to, double h,
                                          std::span<const double> seed_offsets) {
    const auto& cc = detail::require_curve_chasing(m);
    const bool rising = b == Branch::ascending;
    if (rising ? !(v_to > v_from) : !(v_to < v_from)) {
        throw InvalidArgument("verify_invariance: rising branch sweeps forward, falling branch backward");
    }
    const CurveSpec& curve = rising ? cc.c1 : cc.c2;
    const auto slopes = slope_range(curve, std::min(v_from, v_to), std::max(v_from, v_to));
    if (rising ? slopes.min < 0.0 : slopes.max > 0.0) {
        throw HypothesisViolated(rising ? "dc1/dv < 0 on the sweep range" : "dc2/dv > 0 on the sweep range");
    }
    InvarianceReport rep;
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    for (double off : seed_offsets) {
        if (off > 0.0) {
            ++rep.seeds_skipped;
            continue;
        }
        ++rep.seeds_checked;
        const auto tr = sweep(m, b, v_from, v_to, curve(v_from) + off, h);
        for (const auto& s : tr.samples) {
            const double excess = s.g - curve(s.v);
            if (excess > rep.worst_violation) {
                rep.worst_violation = excess;
                rep.witness_v = s.v;
            }
        }
    }
    if (rep.seeds_checked == 0) {
        rep.applicable = false;
        rep.worst_violation = 0.0;
        return rep;
    }
    rep.pass = rep.worst_violation <= invariance_tolerance;
    return rep;
}

inline InvarianceReport verify_invariance(const DuhemModel& m, Branch b, double v_from, double v_to, double h) {
    static constexpr double offsets[] = {0.0, -1.0, -5.0};
    return verify_invariance(m, b, v_from, v_to, h, offsets);
}

} // namespace duhem

#endif // DUHEM_GEOMETRY_HPP
