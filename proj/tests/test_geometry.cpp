#include "duhem/geometry.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

using namespace duhem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DuhemModel cubic() { return DuhemModel::curve_chasing(CurveSpec::cubic(0, 1, 0.04), -CurveSpec::cubic(0, 1, 0.04)); }
DuhemModel negated() { return DuhemModel::curve_chasing(-CurveSpec::cubic(0, 1, 0.04), CurveSpec::cubic(0, 1, 0.04)); }
DuhemModel multiloop() {
    const double pi = std::numbers::pi;
    return DuhemModel::curve_chasing({{}, {{10.0, 6 * pi, pi / 8}}}, {{}, {{-8.0, 6 * pi, -pi / 8}}});
}

std::vector<oracle::P> points(const BranchTrajectory& t) {
    std::vector<oracle::P> out;
    for (const auto& s : t.samples) out.push_back({s.v, s.g});
    return out;
}

std::vector<oracle::P> interior(std::vector<oracle::P> xs, double lo, double hi, double margin) {
    std::erase_if(xs, [&](const oracle::P& p) { return p.x - lo <= margin || hi - p.x <= margin; });
    return xs;
}

std::vector<oracle::P> closed_curve(const ClosedOrbit& o) {
    auto poly = points(o.ascending);
    const auto d = points(o.descending);
    poly.insert(poly.end(), d.begin(), d.end());
    return poly;
}

ClosedOrbit manual_orbit(std::vector<BranchSample> up, std::vector<BranchSample> down) {
    ClosedOrbit o;
    o.ascending = {Branch::ascending, std::move(up), 1.0};
    o.descending = {Branch::descending, std::move(down), 1.0};
    return o;
}

} // namespace

TEST_CASE("Bouc-Wen orbit is a simple loop") {
    const auto orbit = find_periodic_orbit(DuhemModel::bouc_wen(1, 1, 2, 1), -1, 1, 0.0);
    CHECK(self_intersections(orbit).empty());
    CHECK(interior(oracle::all_crossings(points(orbit.ascending), points(orbit.descending)), -1, 1, 0.0015).empty());
    const auto a = analyze_loop(orbit);
    // Rising branch runs above the falling one, so the loop is traversed clockwise.
    const double oracle_area = oracle::shoelace(closed_curve(orbit));
    CHECK(oracle_area < 0.0);
    CHECK(a.loop_class == LoopClass::simple_cw);
    CHECK_THAT(a.signed_area, WithinRel(oracle_area, 1e-9));
    REQUIRE(a.lobes.size() == 1);
    CHECK(a.lobes[0].orientation == Orientation::clockwise);
}

TEST_CASE("cubic butterfly has one central crossing and opposite lobes") {
    const auto orbit = find_periodic_orbit(cubic(), -5, 5, 0.0);
    const auto xs = self_intersections(orbit);
    REQUIRE(xs.size() == 1);
    CHECK(std::abs(xs[0].v) < 1e-3);
    const auto ref = interior(oracle::all_crossings(points(orbit.ascending), points(orbit.descending)), -5, 5, 0.0075);
    REQUIRE(ref.size() == 1);
    CHECK_THAT(xs[0].v, WithinAbs(ref[0].x, 1e-9));
    CHECK_THAT(xs[0].g, WithinAbs(ref[0].y, 1e-9));

    const auto lobes = decompose_lobes(orbit, xs);
    REQUIRE(lobes.size() == 2);
    CHECK(lobes[0].signed_area * lobes[1].signed_area < 0.0);
    CHECK(lobes[0].orientation == Orientation::counterclockwise);
    CHECK(lobes[1].orientation == Orientation::clockwise);
    for (const auto& l : lobes) {
        std::vector<oracle::P> poly;
        for (const auto& v : l.vertices) poly.push_back({v.v, v.g});
        CHECK_THAT(l.signed_area, WithinRel(oracle::shoelace(poly), 1e-9));
    }
    const double total = oracle::shoelace(closed_curve(orbit));
    const double scale = std::abs(lobes[0].signed_area) + std::abs(lobes[1].signed_area);
    CHECK(std::abs(lobes[0].signed_area + lobes[1].signed_area - total) <= 1e-9 * scale);
    CHECK(classify_loop(orbit) == LoopClass::butterfly);
}

TEST_CASE("negated cubic flips every lobe") {
    const auto a = analyze_loop(find_periodic_orbit(cubic(), -5, 5, 0.0));
    const auto b = analyze_loop(find_periodic_orbit(negated(), -5, 5, 0.0));
    CHECK(b.loop_class == LoopClass::butterfly);
    REQUIRE(a.lobes.size() == b.lobes.size());
    CHECK(a.intersections.size() == b.intersections.size());
    for (std::size_t i = 0; i < a.lobes.size(); ++i) CHECK(a.lobes[i].orientation != b.lobes[i].orientation);
}

TEST_CASE("sinusoidal model gives a multi-loop orbit") {
    const auto orbit = find_periodic_orbit(multiloop(), -12, 12, 0.0);
    const auto a = analyze_loop(orbit);
    CHECK(a.loop_class == LoopClass::multi_loop);
    CHECK(a.intersections.size() >= 2);
    CHECK(a.lobes.size() >= 3);
    const auto ref = interior(oracle::all_crossings(points(orbit.ascending), points(orbit.descending)), -12, 12, 0.018);
    CHECK(ref.size() == a.intersections.size());
    double sum = 0.0, abs_sum = 0.0;
    for (const auto& l : a.lobes) {
        sum += l.signed_area;
        abs_sum += std::abs(l.signed_area);
    }
    CHECK(std::abs(sum - a.signed_area) <= 1e-9 * abs_sum);
}

TEST_CASE("intersection search is symmetric and stable under refinement") {
    const auto m = cubic();
    const auto coarse = find_periodic_orbit(m, -5, 5, 0.0, 1e-8, 500, 0.005);
    const auto fine = find_periodic_orbit(m, -5, 5, 0.0, 1e-8, 500, 0.0025);
    const auto xc = self_intersections(coarse), xf = self_intersections(fine);
    REQUIRE(xc.size() == xf.size());
    for (std::size_t i = 0; i < xc.size(); ++i) CHECK(std::abs(xc[i].v - xf[i].v) <= 1e-4);
    const auto ab = polyline_crossings(coarse.ascending.samples, coarse.descending.samples).points;
    const auto ba = polyline_crossings(coarse.descending.samples, coarse.ascending.samples).points;
    REQUIRE(ab.size() == ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
        CHECK_THAT(ab[i].v, WithinAbs(ba[i].v, 1e-12));
        CHECK_THAT(ab[i].g, WithinAbs(ba[i].g, 1e-12));
    }
}

TEST_CASE("random polylines agree with the exhaustive oracle") {
    std::mt19937 rng(1234);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<BranchSample> a, b;
        std::vector<oracle::P> pa, pb;
        double ga = 0.0, gb = 0.0;
        for (int i = 0; i <= 60; ++i) {
            const double v = -3.0 + 0.1 * i + 0.001 * trial;
            ga += 0.3 * noise(rng);
            a.push_back({v, ga});
            pa.push_back({v, ga});
        }
        for (int i = 0; i <= 45; ++i) {
            const double v = 3.0 - 0.1333 * i;
            gb += 0.3 * noise(rng);
            b.push_back({v, gb});
            pb.push_back({v, gb});
        }
        const auto got = polyline_crossings(a, b).points;
        const auto want = oracle::all_crossings(pa, pb);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK_THAT(got[i].v, WithinAbs(want[i].x, 1e-9));
    }
}

TEST_CASE("degenerate and inconsistent inputs") {
    const auto point = manual_orbit({{1.0, 0.0}}, {{1.0, 0.0}});
    CHECK_THROWS_AS(self_intersections(point), DegenerateOrbit);
    CHECK(classify_loop(point) == LoopClass::degenerate);

    const auto flat = manual_orbit({{0, 0}, {1, 0}, {2, 0}}, {{2, 0}, {1, 0}, {0, 0}});
    CHECK(classify_loop(flat) == LoopClass::degenerate);

    const auto square = manual_orbit({{0, 0}, {1, 1}, {2, 0}}, {{2, 0}, {1, -1}, {0, 0}});
    const auto xs = self_intersections(square);
    CHECK(xs.empty());
    const auto lobes = decompose_lobes(square, xs);
    REQUIRE(lobes.size() == 1);
    CHECK_THAT(lobes[0].signed_area, WithinAbs(-2.0, 1e-15));
    CHECK(classify_loop(square) == LoopClass::simple_cw);

    // Two crossings listed in an order the branches cannot both follow.
    IntersectionPoint p{0.5, 0.0, 0, 1, 0.5, 0.5}, q{1.5, 0.0, 1, 0, 0.5, 0.5};
    const std::vector<IntersectionPoint> bad{q, p};
    const auto zig = manual_orbit({{0, 0}, {1, 1}, {2, 0}}, {{2, 0}, {1, -1}, {0, 0}});
    CHECK_THROWS_AS(decompose_lobes(zig, bad), InconsistentTopology);
}

TEST_CASE("butterfly construction") {
    const auto m = cubic();
    SECTION("seed at -2") {
        const auto b = construct_butterfly(m, -2.0, 0.5, 0.005);
        CHECK(b.ordered());
        CHECK(b.v_min < -2.0);
        CHECK(b.v_b_plus < b.v_min);
        CHECK(b.v_max < b.v_b_minus);
        CHECK(b.v_a_minus == b.v_c_plus + b.epsilon);
        CHECK(b.max_residual() <= 1e-6);
        const auto& cc = *m.curve_chasing_params();
        const std::vector<double> poly{0, 1, 0, 0.04};
        // Rising branch through the seed, evaluated exactly.
        auto rise = [&](double v) { return oracle::poly_chase(poly, 1.0, -2.0, cc.c1(-2.0), v); };
        CHECK_THAT(rise(b.v_b_plus), WithinAbs(cc.c2(b.v_b_plus), 1e-6));
        CHECK_THAT(rise(b.v_c_plus), WithinAbs(cc.c2(b.v_c_plus), 1e-6));
    }
    SECTION("symmetric seeds cross at the symmetry axis") {
        const auto x = butterfly_inner_crossing(m, -2.0, 2.0, 0.005);
        REQUIRE(x);
        CHECK(std::abs(*x) <= 1e-6);
    }
    SECTION("slope hypothesis is gated") {
        const auto wavy = DuhemModel::curve_chasing(CurveSpec{{0, 1, 0, 0.04}, {{3.0, 2.0, 0.0}}}, -CurveSpec::cubic(0, 1, 0.04));
        CHECK_THROWS_AS(construct_butterfly(wavy, -2.0, 0.5, 0.005), HypothesisViolated);
        CHECK_THROWS_AS(construct_butterfly(DuhemModel::bouc_wen(1, 1, 2, 1), -2.0, 0.5, 0.005), HypothesisViolated);
        CHECK_THROWS_AS(construct_butterfly(m, 2.0, 0.5, 0.005), HypothesisViolated);
    }
}

TEST_CASE("invariance below the level curves") {
    const auto m = cubic();
    const auto up = verify_invariance(m, Branch::ascending, -3.0, 5.0, 0.005);
    CHECK(up.applicable);
    CHECK(up.pass);
    CHECK(up.worst_violation <= 1e-7);
    CHECK(up.seeds_checked == 3);
    const auto down = verify_invariance(m, Branch::descending, 5.0, -5.0, 0.005);
    CHECK(down.pass);

    const double below[] = {-1.0};
    const auto approach = verify_invariance(m, Branch::ascending, -3.0, 5.0, 0.005, below);
    CHECK(approach.pass);
    CHECK(approach.worst_violation < 0.0);

    const double above[] = {1.0};
    const auto na = verify_invariance(m, Branch::ascending, -3.0, 5.0, 0.005, above);
    CHECK_FALSE(na.applicable);
    CHECK(na.seeds_skipped == 1);

    CHECK_THROWS_AS(verify_invariance(negated(), Branch::ascending, -3.0, 5.0, 0.005), HypothesisViolated);
    CHECK_THROWS_AS(verify_invariance(m, Branch::ascending, 5.0, -3.0, 0.005), InvalidArgument);
}
