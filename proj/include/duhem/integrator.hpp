#ifndef DUHEM_INTEGRATOR_HPP
#define DUHEM_INTEGRATOR_HPP

#include "errors.hpp"
#include "models.hpp"
#include "signals.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace duhem {

/// |output| beyond this is treated as a blow-up.
inline constexpr double divergence_sentinel = 1e9;

struct BranchSample {
    double v;
    double g;

    friend bool operator==(const BranchSample&, const BranchSample&) = default;
};

/// Solution of dg/dv = f_branch(v, g) sampled on a uniform input grid.
struct BranchTrajectory {
    Branch branch = Branch::ascending;
    std::vector<BranchSample> samples;
    double step = 0.0;

    const BranchSample& front() const { return samples.front(); }
    const BranchSample& back() const { return samples.back(); }
    bool increasing() const { return samples.size() > 1 && samples[1].v > samples[0].v; }
};

enum class TimeBranch { stationary = 0, ascending = 1, descending = 2 };

struct TimeSample {
    double t;
    double u;
    double y;
    TimeBranch branch;

    friend bool operator==(const TimeSample&, const TimeSample&) = default;
};

struct TimeTrajectory {
    std::vector<TimeSample> samples;
};

/// The state left the finite range (non-finite or beyond the sentinel).
/// Carries whatever was integrated before the failure.
class NonFiniteState : public Error {
public:
    NonFiniteState(std::string what, double location, BranchTrajectory partial)
        : Error(std::move(what)), location_(location), partial_branch_(std::move(partial)) {}
    NonFiniteState(std::string what, double location, TimeTrajectory partial)
        : Error(std::move(what)), location_(location), partial_time_(std::move(partial)) {}

    /// Input value (for sweeps) or time (for simulations) where the state blew up.
    double location() const noexcept { return location_; }
    const BranchTrajectory& partial_branch() const noexcept { return partial_branch_; }
    const TimeTrajectory& partial_time() const noexcept { return partial_time_; }

private:
    double location_;
    BranchTrajectory partial_branch_;
    TimeTrajectory partial_time_;
};

inline double rk4_step(const DuhemModel& m, Branch b, double v, double g, double dv) {
    const double half = 0.5 * dv;
    const double k1 = m.field(b, v, g);
    const double k2 = m.field(b, v + half, g + half * k1);
    const double k3 = m.field(b, v + half, g + half * k2);
    const double k4 = m.field(b, v + dv, g + dv * k3);
    return g + dv / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {

inline bool out_of_range(double g) { return !std::isfinite(g) || std::abs(g) > divergence_sentinel; }

inline std::size_t step_count(double span, double h) {
    const double q = std::abs(span) / h;
    const auto n = static_cast<std::size_t>(std::ceil(q - 1e-9));
    return n == 0 ? 1 : n;
}

} // namespace detail

/// Classical RK4 on the grid v_k = from + k*h*sign(to - from), last step shortened to land on `to`.
inline BranchTrajectory sweep(const DuhemModel& m, Branch b, double from, double to, double g0, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("sweep: step must be positive and finite");
    if (!std::isfinite(from) || !std::isfinite(to) || !std::isfinite(g0)) {
        throw InvalidArgument("sweep: non-finite endpoint or initial value");
    }
    BranchTrajectory traj{b, {{from, g0}}, h};
    if (from == to) return traj;
    const double dir = to > from ? 1.0 : -1.0;
    const std::size_t n = detail::step_count(to - from, h);
    traj.samples.reserve(n + 1);
    double v = from, g = g0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double next = k == n ? to : from + dir * static_cast<double>(k) * h;
        g = rk4_step(m, b, v, g, next - v);
        if (detail::out_of_range(g)) {
            throw NonFiniteState("sweep: output left the finite range at v = " + std::to_string(next), next,
                                 std::move(traj));
        }
        v = next;
        traj.samples.push_back({v, g});
    }
    return traj;
}

/// Continuous extension between grid samples by a partial RK4 step from the
/// nearest sample behind `v` in the integration direction.
inline double value_at(const DuhemModel& m, const BranchTrajectory& traj, double v) {
    const auto& s = traj.samples;
    if (s.size() == 1) return s.front().g;
    const bool inc = s[1].v > s[0].v;
    std::size_t lo = 0, hi = s.size() - 1;
    auto behind = [inc](double a, double x) { return inc ? a <= x : a >= x; };
    if (!behind(s.front().v, v) || !behind(v, s.back().v)) {
        throw InvalidArgument("value_at: input value outside the trajectory range");
    }
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (behind(s[mid].v, v)) lo = mid;
        else hi = mid;
    }
    if (s[lo].v == v) return s[lo].g;
    if (s[hi].v == v) return s[hi].g;
    return rk4_step(m, traj.branch, s[lo].v, s[lo].g, v - s[lo].v);
}

/// Time-domain response y = Phi(u, y0) on [0, horizon], integrated per monotone sweep.
/// Rising and stationary parts use f1 (stationary parts leave y unchanged), falling parts f2.
inline TimeTrajectory simulate(const DuhemModel& m, const InputSignal& s, double y0, double horizon, double h) {
    if (!(horizon > 0.0)) throw InvalidArgument("simulate: horizon must be positive");
    if (!(h > 0.0)) throw InvalidArgument("simulate: step must be positive");
    const auto sweeps = monotone_partition(s, horizon);
    TimeTrajectory out;
    auto label = [](SweepDirection d) {
        switch (d) {
        case SweepDirection::increasing: return TimeBranch::ascending;
        case SweepDirection::decreasing: return TimeBranch::descending;
        default: return TimeBranch::stationary;
        }
    };
    out.samples.push_back({0.0, sweeps.front().u_start, y0, label(sweeps.front().direction)});
    double y = y0;
    for (const auto& sw : sweeps) {
        const auto tb = label(sw.direction);
        if (sw.direction == SweepDirection::stationary) {
            out.samples.push_back({sw.t_end, sw.u_end, y, tb});
            continue;
        }
        const Branch b = sw.direction == SweepDirection::increasing ? Branch::ascending : Branch::descending;
        auto append = [&](const BranchTrajectory& tr) {
            for (std::size_t k = 1; k < tr.samples.size(); ++k) {
                const auto& smp = tr.samples[k];
                const double t = smp.v == sw.u_end ? sw.t_end : sw.time_at(smp.v);
                out.samples.push_back({t, smp.v, smp.g, tb});
            }
        };
        try {
            const auto tr = sweep(m, b, sw.u_start, sw.u_end, y, h);
            append(tr);
            y = tr.back().g;
        } catch (const NonFiniteState& e) {
            append(e.partial_branch());
            const double t_fail = sw.time_at(e.location());
            throw NonFiniteState("simulate: output diverged at t = " + std::to_string(t_fail), t_fail,
                                 std::move(out));
        }
    }
    return out;
}

enum class CrossingDirection { forward, backward };

struct Crossing {
    double v;
    double g;
};

inline constexpr double crossing_tolerance = 1e-8;

/// Integrates dg/dv = f_branch from (v_start, g_start) toward v_limit and returns the
/// first point where the trajectory meets `target`, or nullopt if v_limit is reached.
inline std::optional<Crossing> extend_to_crossing(const DuhemModel& m, Branch b, double v_start, double g_start,
                                                  const CurveSpec& target, CrossingDirection direction,
                                                  double v_limit, double h) {
    if (!(h > 0.0)) throw InvalidArgument("extend_to_crossing: step must be positive");
    const double dir = direction == CrossingDirection::forward ? 1.0 : -1.0;
    if (!((v_limit - v_start) * dir > 0.0)) {
        throw InvalidArgument("extend_to_crossing: limit must lie beyond the start in the stated direction");
    }
    auto gap = [&](double v, double g) { return g - target(v); };
    if (gap(v_start, g_start) == 0.0) return Crossing{v_start, g_start};

    BranchTrajectory seen{b, {{v_start, g_start}}, h};
    const std::size_t n = detail::step_count(v_limit - v_start, h);
    double v = v_start, g = g_start;
    for (std::size_t k = 1; k <= n; ++k) {
        const double next = k == n ? v_limit : v_start + dir * static_cast<double>(k) * h;
        const double g_next = rk4_step(m, b, v, g, next - v);
        if (detail::out_of_range(g_next)) {
            throw NonFiniteState("extend_to_crossing: output left the finite range at v = " + std::to_string(next),
                                 next, std::move(seen));
        }
        const double d0 = gap(v, g), d1 = gap(next, g_next);
        if (d1 == 0.0) return Crossing{next, g_next};
        if (std::signbit(d0) != std::signbit(d1)) {
            // Re-integrate the bracketing step on a 64x finer grid, then bisect inside one sub-step.
            const double sub = (next - v) / 64.0;
            double a = v, ga = g;
            for (int j = 1; j <= 64; ++j) {
                const double bnext = j == 64 ? next : v + j * sub;
                const double gb = rk4_step(m, b, a, ga, bnext - a);
                if (gap(bnext, gb) == 0.0) return Crossing{bnext, gb};
                if (std::signbit(gap(a, ga)) != std::signbit(gap(bnext, gb))) {
                    double lo = a, hi = bnext;
                    const double glo_sign = gap(a, ga);
                    while (std::abs(hi - lo) > crossing_tolerance) {
                        const double mid = 0.5 * (lo + hi);
                        const double gm = rk4_step(m, b, a, ga, mid - a);
                        const double dm = gap(mid, gm);
                        if (dm == 0.0) return Crossing{mid, gm};
                        if (std::signbit(dm) == std::signbit(glo_sign)) lo = mid;
                        else hi = mid;
                    }
                    const double vx = 0.5 * (lo + hi);
                    return Crossing{vx, rk4_step(m, b, a, ga, vx - a)};
                }
                a = bnext;
                ga = gb;
            }
            // Sign change vanished under refinement; treat the coarse endpoint as the crossing.
            return Crossing{next, g_next};
        }
        v = next;
        g = g_next;
        seen.samples.push_back({v, g});
    }
    return std::nullopt;
}

} // namespace duhem

#endif // DUHEM_INTEGRATOR_HPP
