#include "duhem/models.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace duhem;
using Catch::Matchers::WithinAbs;

namespace {

DuhemModel cubic() { return DuhemModel::curve_chasing(CurveSpec::cubic(0, 1, 0.04), -CurveSpec::cubic(0, 1, 0.04)); }

DuhemModel multiloop() {
    const double pi = std::numbers::pi;
    return DuhemModel::curve_chasing({{}, {{10.0, 6 * pi, pi / 8}}}, {{}, {{-8.0, 6 * pi, -pi / 8}}});
}

} // namespace

TEST_CASE("field values") {
    CHECK(eval_field(DuhemModel::bouc_wen(1, 1, 2, 1), Branch::ascending, 0.3, 0.0) == 1.0);
    CHECK(eval_field(cubic(), Branch::ascending, 0.0, 0.0) == 0.0);
    CHECK_THAT(eval_field(DuhemModel::bouc_wen(0.1, 0.1, -0.2, 1), Branch::descending, 4.0, 1.0), WithinAbs(-0.2, 1e-15));
    // f2 vanishes on c2 for the sinusoidal model: the definition k (g - c2), not the printed variant.
    const auto m = multiloop();
    const auto& cc = *m.curve_chasing_params();
    for (double v : linspace(-12, 12, 97)) CHECK(eval_field(m, Branch::descending, v, cc.c2(v)) == 0.0);
}

TEST_CASE("factories validate parameters") {
    CHECK_THROWS_AS(DuhemModel::bouc_wen(1, 1, 2, 0.5), InvalidArgument);
    CHECK_THROWS_AS(DuhemModel::curve_chasing(CurveSpec::constant(0), CurveSpec::constant(0), 0.0), InvalidArgument);
    CHECK_THROWS_AS(boucwen_classify(1, 1, 2, 0.9), InvalidArgument);
}

TEST_CASE("curve evaluation and derivative") {
    const auto c = CurveSpec::cubic(0.5, 1.0, 0.04);
    for (double v : {-3.0, 0.0, 2.5}) {
        CHECK_THAT(c(v), WithinAbs(0.5 + v + 0.04 * v * v * v, 1e-12));
        CHECK_THAT(c.derivative(v), WithinAbs(1.0 + 0.12 * v * v, 1e-12));
    }
    const CurveSpec s{{}, {{10.0, 6 * std::numbers::pi, std::numbers::pi / 8}}};
    for (double v : linspace(-1, 1, 41)) {
        const double fd = (s(v + 1e-6) - s(v - 1e-6)) / 2e-6;
        CHECK_THAT(s.derivative(v), WithinAbs(fd, 1e-4));
    }
}

TEST_CASE("anhysteresis curve") {
    SECTION("Bouc-Wen with zeta != 0 is zero everywhere") {
        for (double v : linspace(-1, 1, 11)) CHECK(std::abs(anhysteresis_at(DuhemModel::bouc_wen(1, 1, 2, 1), v, {-3, 3})) <= 1e-10);
    }
    SECTION("curve chasing gives the midpoint of the level curves") {
        const auto m = DuhemModel::curve_chasing(CurveSpec::cubic(1, 2, 0.1), CurveSpec::cubic(-0.5, -1, 0.0));
        const auto& cc = *m.curve_chasing_params();
        const auto curve = anhysteresis_curve(m, linspace(-2, 2, 21), 50.0);
        for (const auto& s : curve.samples) {
            CHECK_THAT(s.alpha, WithinAbs(0.5 * (cc.c1(s.v) + cc.c2(s.v)), 1e-9));
            CHECK(std::abs(m.field(Branch::ascending, s.v, s.alpha) - m.field(Branch::descending, s.v, s.alpha)) <= 1e-8);
        }
    }
    SECTION("symmetric curves give zero") {
        for (double v : linspace(-5, 5, 11)) CHECK(std::abs(anhysteresis_at(cubic(), v, {-20, 20})) <= 1e-10);
    }
    SECTION("a bracket without a sign change reports both endpoint values") {
        try {
            anhysteresis_at(DuhemModel::bouc_wen(1, 1, 2, 1), 0.0, {1.0, 2.0});
            FAIL("expected NoSignChange");
        } catch (const NoSignChange& e) {
            CHECK(e.lo_value() < 0.0);
            CHECK(e.hi_value() < 0.0);
        }
    }
}

TEST_CASE("zero level curves") {
    const auto m = cubic();
    for (double v : linspace(-5, 5, 21)) {
        const double c = zero_level_at(m, Branch::ascending, v, {-1, 1});
        CHECK_THAT(c, WithinAbs(v + 0.04 * v * v * v, 1e-12));
        CHECK(m.field(Branch::ascending, v, c) == 0.0);
    }
    const auto ml = multiloop();
    CHECK_THAT(zero_level_at(ml, Branch::descending, 0.1, {-1, 1}),
               WithinAbs(-8 * std::sin(6 * std::numbers::pi * 0.1 - std::numbers::pi / 8), 1e-15));
    // 1 - |g| - 2g = 0 on g > 0
    CHECK_THAT(zero_level_at(DuhemModel::bouc_wen(1, 1, 2, 1), Branch::ascending, 0.0, {0.0, 3.0}), WithinAbs(1.0 / 3.0, 1e-9));
}

TEST_CASE("sign regions around the level curves") {
    for (const auto& m : {cubic(), multiloop()}) {
        const auto& cc = *m.curve_chasing_params();
        for (double v : linspace(-5, 5, 41)) {
            for (double d : {0.01, 1.0, 7.0}) {
                CHECK(m.field(Branch::ascending, v, cc.c1(v) + d) < 0.0);
                CHECK(m.field(Branch::ascending, v, cc.c1(v) - d) > 0.0);
                CHECK(m.field(Branch::descending, v, cc.c2(v) + d) > 0.0);
                CHECK(m.field(Branch::descending, v, cc.c2(v) - d) < 0.0);
            }
        }
    }
}

TEST_CASE("output monotonicity certificates") {
    const auto vs = linspace(-1, 1, 17);
    const auto gs = linspace(-3, 3, 25);
    CHECK(check_output_monotonicity(DuhemModel::bouc_wen(1, 1, 2, 1), MonotonicityMode::convergent, vs, gs).holds);
    CHECK(check_output_monotonicity(DuhemModel::bouc_wen(0.1, 0.1, -0.2, 1), MonotonicityMode::divergent, vs, gs).holds);
    const auto bad = check_output_monotonicity(DuhemModel::bouc_wen(1, 2, 1, 1), MonotonicityMode::convergent, vs, gs);
    CHECK_FALSE(bad.holds);
    REQUIRE(bad.witness);
    for (const auto& m : {cubic(), multiloop(), DuhemModel::curve_chasing(CurveSpec::constant(3), CurveSpec::cubic(1, -2, 5), 0.3)}) {
        CHECK(check_output_monotonicity(m, MonotonicityMode::strictly_convergent, linspace(-12, 12, 33), gs).holds);
    }
    CHECK_THROWS_AS(check_output_monotonicity(cubic(), MonotonicityMode::convergent, vs, std::vector<double>{1.0, 1.0}),
                    InvalidArgument);
}

TEST_CASE("well-posedness estimates") {
    const auto vs = linspace(-1, 1, 9);
    const auto gs = linspace(-3, 3, 31);
    const auto cc = check_wellposedness(cubic(), vs, gs);
    CHECK(cc.satisfied);
    CHECK(cc.lambda1_estimate == 0.0);
    CHECK(cc.lambda2_estimate == 0.0);
    const auto bw = check_wellposedness(DuhemModel::bouc_wen(1, 1, 2, 1), vs, gs);
    CHECK(bw.satisfied);
    CHECK(std::isfinite(bw.lambda1_estimate));
    // Divergent Bouc-Wen: f1 increases with slope 0.1 on g < 0.
    const auto dv = check_wellposedness(DuhemModel::bouc_wen(0.1, 0.1, -0.2, 1), vs, gs);
    CHECK_THAT(dv.lambda1_estimate, WithinAbs(0.3, 1e-12));
    const auto single = check_wellposedness(cubic(), vs, std::vector<double>{0.5});
    CHECK(single.satisfied);
    CHECK(single.lambda1_estimate == 0.0);
}

TEST_CASE("Bouc-Wen classification") {
    CHECK(boucwen_classify(1, 1, 2, 1) == BoucWenClass::convergence_certified);
    CHECK(boucwen_classify(0.1, 0.1, -0.2, 1) == BoucWenClass::divergence_certified);
    CHECK(boucwen_classify(1, 2, 1, 1) == BoucWenClass::indeterminate);
    CHECK(boucwen_classify(0, 0, 0, 1) == BoucWenClass::convergence_certified);
    for (double b : linspace(-2, 2, 10)) {
        for (double z : linspace(-2, 2, 10)) {
            const auto base = boucwen_classify(1, b, z, 1);
            for (double s : {0.01, 0.5, 3.0, 100.0}) CHECK(boucwen_classify(1, s * b, s * z, 1) == base);
        }
    }
}

TEST_CASE("slope range of level curves") {
    const auto r = slope_range(CurveSpec::cubic(0, 1, 0.04), -30, 30);
    CHECK(r.min >= 1.0 - 1e-12);
    CHECK_THAT(r.max, WithinAbs(1 + 0.12 * 900, 1e-9));
    CHECK_THAT(r.max_abs(), WithinAbs(r.max, 0.0));
}
