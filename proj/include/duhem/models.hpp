#ifndef DUHEM_MODELS_HPP
#define DUHEM_MODELS_HPP

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace duhem {

/// Which vector field is active: f1 on rising input, f2 on falling input.
enum class Branch { ascending = 1, descending = 2 };

inline int branch_index(Branch b) noexcept { return static_cast<int>(b); }

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {a};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::lerp(a, b, static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
}

struct Sinusoid {
    double amplitude;
    double frequency; // rad per unit input
    double phase;     // rad

    friend bool operator==(const Sinusoid&, const Sinusoid&) = default;
};

/// Scalar curve sum_j a_j v^j + sum_k A_k sin(w_k v + phi_k), with closed-form derivative.
struct CurveSpec {
    std::vector<double> poly;
    std::vector<Sinusoid> sinusoids;

    static CurveSpec cubic(double a1, double a2, double a3) { return {{a1, a2, 0.0, a3}, {}}; }
    static CurveSpec constant(double c) { return {{c}, {}}; }

    double operator()(double v) const {
        double acc = 0.0;
        for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * v + *it;
        for (const auto& s : sinusoids) acc += s.amplitude * std::sin(s.frequency * v + s.phase);
        return acc;
    }

    double derivative(double v) const {
        double acc = 0.0;
        for (std::size_t j = poly.size(); j-- > 1;) acc = acc * v + static_cast<double>(j) * poly[j];
        for (const auto& s : sinusoids) {
            acc += s.amplitude * s.frequency * std::cos(s.frequency * v + s.phase);
        }
        return acc;
    }

    CurveSpec operator-() const {
        CurveSpec out = *this;
        for (auto& a : out.poly) a = -a;
        for (auto& s : out.sinusoids) s.amplitude = -s.amplitude;
        return out;
    }

    friend bool operator==(const CurveSpec&, const CurveSpec&) = default;
};

/// f1 = alpha - beta|g|^n - zeta g|g|^(n-1), f2 = alpha - beta|g|^n + zeta g|g|^(n-1).
struct BoucWen {
    double alpha;
    double beta;
    double zeta;
    double n;

    friend bool operator==(const BoucWen&, const BoucWen&) = default;
};

/// f1 = k (c1(v) - g), f2 = k (g - c2(v)): each branch relaxes toward its zero level curve.
struct CurveChasing {
    CurveSpec c1;
    CurveSpec c2;
    double gain;

    friend bool operator==(const CurveChasing&, const CurveChasing&) = default;
};

class DuhemModel {
public:
    using Variant = std::variant<BoucWen, CurveChasing>;

    static DuhemModel bouc_wen(double alpha, double beta, double zeta, double n) {
        if (!(n >= 1.0)) throw InvalidArgument("Bouc-Wen exponent n must be >= 1");
        return DuhemModel(BoucWen{alpha, beta, zeta, n});
    }

    static DuhemModel curve_chasing(CurveSpec c1, CurveSpec c2, double gain = 1.0) {
        if (!(gain > 0.0)) throw InvalidArgument("curve-chasing gain must be positive");
        return DuhemModel(CurveChasing{std::move(c1), std::move(c2), gain});
    }

    const Variant& variant() const noexcept { return v_; }
    const BoucWen* bouc_wen_params() const noexcept { return std::get_if<BoucWen>(&v_); }
    const CurveChasing* curve_chasing_params() const noexcept { return std::get_if<CurveChasing>(&v_); }

    double field(Branch b, double v, double g) const {
        if (const auto* bw = bouc_wen_params()) {
            const double mag = std::pow(std::abs(g), bw->n);
            const double odd = g * std::pow(std::abs(g), bw->n - 1.0);
            return b == Branch::ascending ? bw->alpha - bw->beta * mag - bw->zeta * odd
                                          : bw->alpha - bw->beta * mag + bw->zeta * odd;
        }
        const auto& cc = std::get<CurveChasing>(v_);
        return b == Branch::ascending ? cc.gain * (cc.c1(v) - g) : cc.gain * (g - cc.c2(v));
    }

    friend bool operator==(const DuhemModel&, const DuhemModel&) = default;

private:
    explicit DuhemModel(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

inline double eval_field(const DuhemModel& m, Branch b, double v, double g) { return m.field(b, v, g); }

struct Bracket {
    double lo;
    double hi;
};

inline constexpr double default_bisection_tol = 1e-10;
inline constexpr int default_bisection_iterations = 200;

/// Bisection on a residual. Stops once |g(x)| <= tol or the iteration cap is hit.
template <typename F>
double bisect_root(F&& g, Bracket br, double tol = default_bisection_tol,
                   int max_iter = default_bisection_iterations) {
    double lo = br.lo, hi = br.hi;
    double glo = g(lo), ghi = g(hi);
    if (std::abs(glo) <= tol) return lo;
    if (std::abs(ghi) <= tol) return hi;
    if (!(std::signbit(glo) != std::signbit(ghi))) throw NoSignChange(glo, ghi);
    double best = std::abs(glo) < std::abs(ghi) ? lo : hi;
    double best_res = std::min(std::abs(glo), std::abs(ghi));
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) < best_res) {
            best = mid;
            best_res = std::abs(gm);
        }
        if (std::abs(gm) <= tol || mid == lo || mid == hi) return mid;
        if (std::signbit(gm) == std::signbit(glo)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return best;
}

/// alpha(v): root of f1 - f2 in the bracket.
inline double anhysteresis_at(const DuhemModel& m, double v, Bracket br, double tol = default_bisection_tol) {
    return bisect_root([&](double g) { return m.field(Branch::ascending, v, g) - m.field(Branch::descending, v, g); },
                       br, tol);
}

/// c_b(v): zero level of f_b. Analytic for curve-chasing models.
inline double zero_level_at(const DuhemModel& m, Branch b, double v, Bracket br, double tol = default_bisection_tol) {
    if (const auto* cc = m.curve_chasing_params()) return b == Branch::ascending ? cc->c1(v) : cc->c2(v);
    return bisect_root([&](double g) { return m.field(b, v, g); }, br, tol);
}

struct AnhysteresisSample {
    double v;
    double alpha;
};

struct AnhysteresisCurve {
    std::vector<AnhysteresisSample> samples;
    double bracket_half_width;
    double tolerance;
};

inline AnhysteresisCurve anhysteresis_curve(const DuhemModel& m, std::span<const double> vs, double half_width,
                                            double tol = default_bisection_tol) {
    AnhysteresisCurve out{{}, half_width, tol};
    out.samples.reserve(vs.size());
    for (double v : vs) out.samples.push_back({v, anhysteresis_at(m, v, {-half_width, half_width}, tol)});
    return out;
}

/// Sign conditions on (f(v,g1) - f(v,g2)) (g1 - g2).
enum class MonotonicityMode {
    convergent,          // f1 non-increasing, f2 non-decreasing in g
    strictly_convergent, // strict versions
    divergent,           // f1 strictly increasing, f2 strictly decreasing
};

struct MonotonicityWitness {
    Branch branch;
    double v;
    double g1;
    double g2;
    double product;
};

/// Sampled certificate over a finite grid; it is not a proof.
struct MonotonicityVerdict {
    bool holds = true;
    std::optional<MonotonicityWitness> witness;
};

inline MonotonicityVerdict check_output_monotonicity(const DuhemModel& m, MonotonicityMode mode,
                                                     std::span<const double> v_grid,
                                                     std::span<const double> g_grid) {
    if (v_grid.empty()) throw InvalidArgument("check_output_monotonicity: empty input grid");
    {
        std::vector<double> sorted(g_grid.begin(), g_grid.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 2) {
            throw InvalidArgument("check_output_monotonicity: output grid needs two distinct values");
        }
    }
    auto ok = [mode](Branch b, double p) {
        const bool first = b == Branch::ascending;
        switch (mode) {
        case MonotonicityMode::convergent: return first ? p <= 0.0 : p >= 0.0;
        case MonotonicityMode::strictly_convergent: return first ? p < 0.0 : p > 0.0;
        case MonotonicityMode::divergent: return first ? p > 0.0 : p < 0.0;
        }
        return false;
    };
    for (double v : v_grid) {
        for (std::size_t i = 0; i < g_grid.size(); ++i) {
            for (std::size_t j = i + 1; j < g_grid.size(); ++j) {
                const double g1 = g_grid[i], g2 = g_grid[j];
                if (g1 == g2) continue;
                for (Branch b : {Branch::ascending, Branch::descending}) {
                    const double p = (m.field(b, v, g1) - m.field(b, v, g2)) * (g1 - g2);
                    if (!ok(b, p)) return {false, MonotonicityWitness{b, v, g1, g2, p}};
                }
            }
        }
    }
    return {};
}

struct WellPosednessWitness {
    double v;
    double g1;
    double g2;
};

struct WellPosednessReport {
    double lambda1_estimate = 0.0;
    double lambda2_estimate = 0.0;
    bool satisfied = true;
    std::optional<WellPosednessWitness> worst_witness;
};

/// Smallest lambda1, lambda2 >= 0 with
///   (f1(v,g1)-f1(v,g2))(g1-g2) <=  lambda1 (g1-g2)^2
///   (f2(v,g1)-f2(v,g2))(g1-g2) >= -lambda2 (g1-g2)^2
/// on every sampled pair.
inline WellPosednessReport check_wellposedness(const DuhemModel& m, std::span<const double> v_grid,
                                               std::span<const double> g_grid) {
    if (v_grid.empty() || g_grid.empty()) throw InvalidArgument("check_wellposedness: empty grid");
    WellPosednessReport rep;
    double worst = 0.0;
    for (double v : v_grid) {
        for (std::size_t i = 0; i < g_grid.size(); ++i) {
            for (std::size_t j = i + 1; j < g_grid.size(); ++j) {
                const double g1 = g_grid[i], g2 = g_grid[j];
                if (g1 == g2) continue;
                const double q1 = (m.field(Branch::ascending, v, g1) - m.field(Branch::ascending, v, g2)) / (g1 - g2);
                const double q2 = -(m.field(Branch::descending, v, g1) - m.field(Branch::descending, v, g2)) / (g1 - g2);
                rep.lambda1_estimate = std::max(rep.lambda1_estimate, q1);
                rep.lambda2_estimate = std::max(rep.lambda2_estimate, q2);
                if (std::max(q1, q2) > worst) {
                    worst = std::max(q1, q2);
                    rep.worst_witness = WellPosednessWitness{v, g1, g2};
                }
            }
        }
    }
    rep.satisfied = std::isfinite(rep.lambda1_estimate) && std::isfinite(rep.lambda2_estimate);
    return rep;
}

enum class BoucWenClass { convergence_certified, divergence_certified, indeterminate };

inline BoucWenClass boucwen_classify(double /*alpha*/, double beta, double zeta, double n) {
    if (!(n >= 1.0)) throw InvalidArgument("Bouc-Wen exponent n must be >= 1");
    if (beta + zeta >= 0.0 && beta - zeta <= 0.0) return BoucWenClass::convergence_certified;
    if (beta + zeta < 0.0 && beta - zeta > 0.0) return BoucWenClass::divergence_certified;
    return BoucWenClass::indeterminate;
}

inline BoucWenClass boucwen_classify(const BoucWen& p) { return boucwen_classify(p.alpha, p.beta, p.zeta, p.n); }

struct SlopeRange {
    double min;
    double max;
    double max_abs() const { return std::max(std::abs(min), std::abs(max)); }
};

/// Extreme values of dc/dv sampled on a uniform grid of [lo, hi].
inline SlopeRange slope_range(const CurveSpec& c, double lo, double hi, std::size_t samples = 4097) {
    SlopeRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double v : linspace(lo, hi, samples)) {
        const double d = c.derivative(v);
        r.min = std::min(r.min, d);
        r.max = std::max(r.max, d);
    }
    return r;
}

} // namespace duhem

#endif // DUHEM_MODELS_HPP
