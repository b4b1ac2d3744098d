#ifndef DUHEM_SIGNALS_HPP
#define DUHEM_SIGNALS_HPP

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace duhem {

struct Breakpoint {
    double time;
    double value;

    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Piecewise-linear scalar input on t >= 0.
///
/// The first breakpoint sits at t = 0. A non-periodic signal holds its last
/// value after the final breakpoint; a periodic signal repeats the breakpoint
/// list with period T = last time.
class InputSignal {
public:
    InputSignal(std::vector<Breakpoint> breakpoints, bool periodic)
        : breakpoints_(std::move(breakpoints)), periodic_(periodic) {
        if (breakpoints_.size() < 2) {
            throw InvalidArgument("InputSignal: at least 2 breakpoints are required");
        }
        if (breakpoints_.front().time != 0.0) {
            throw InvalidArgument("InputSignal: first breakpoint must be at t = 0");
        }
        for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
            const auto& b = breakpoints_[i];
            if (!std::isfinite(b.time) || !std::isfinite(b.value)) {
                throw InvalidArgument("InputSignal: non-finite breakpoint");
            }
            if (i > 0 && !(b.time > breakpoints_[i - 1].time)) {
                throw InvalidArgument("InputSignal: breakpoint times must be strictly increasing");
            }
        }
        if (periodic_ && breakpoints_.back().value != breakpoints_.front().value) {
            throw InvalidArgument("InputSignal: periodic signal must end at its starting value");
        }
    }

    static InputSignal constant(double value, double duration) {
        return InputSignal({{0.0, value}, {duration, value}}, false);
    }

    std::span<const Breakpoint> breakpoints() const noexcept { return breakpoints_; }
    bool periodic() const noexcept { return periodic_; }
    std::optional<double> period() const {
        if (!periodic_) return std::nullopt;
        return breakpoints_.back().time;
    }
    double end_time() const noexcept { return breakpoints_.back().time; }

    double operator()(double t) const {
        if (periodic_) {
            const double T = end_time();
            double phase = t - std::floor(t / T) * T;
            if (phase >= T) phase = 0.0;
            return interpolate(phase);
        }
        if (t <= 0.0) return breakpoints_.front().value;
        if (t >= end_time()) return breakpoints_.back().value;
        return interpolate(t);
    }

    /// Breakpoints of the (unrolled, if periodic) signal on [a, b], with the
    /// interval ends included as interpolated points. Times strictly increase.
    std::vector<Breakpoint> breakpoints_between(double a, double b) const {
        std::vector<Breakpoint> out;
        out.push_back({a, (*this)(a)});
        auto push = [&](double t, double v) {
            if (t > out.back().time && t < b) out.push_back({t, v});
        };
        if (periodic_) {
            const double T = end_time();
            double k = std::floor(a / T);
            for (; k * T < b; k += 1.0) {
                for (const auto& bp : breakpoints_) push(k * T + bp.time, bp.value);
            }
        } else {
            for (const auto& bp : breakpoints_) push(bp.time, bp.value);
        }
        if (b > out.back().time) out.push_back({b, (*this)(b)});
        return out;
    }

    friend bool operator==(const InputSignal&, const InputSignal&) = default;

private:
    double interpolate(double t) const {
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                                   [](double x, const Breakpoint& b) { return x < b.time; });
        if (it == breakpoints_.begin()) return breakpoints_.front().value;
        if (it == breakpoints_.end()) return breakpoints_.back().value;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        if (t == lo.time) return lo.value;
        return std::lerp(lo.value, hi.value, (t - lo.time) / (hi.time - lo.time));
    }

    std::vector<Breakpoint> breakpoints_;
    bool periodic_;
};

/// Simple periodic input: one minimum at t = 0, one maximum at t_peak.
struct PeriodicInputSpec {
    double u_min;
    double u_max;
    double period;
    double t_peak;

    friend bool operator==(const PeriodicInputSpec&, const PeriodicInputSpec&) = default;
};

enum class SweepDirection { increasing, decreasing, stationary };

struct MonotoneSweep {
    SweepDirection direction;
    double t_start;
    double t_end;
    double u_start;
    double u_end;
    // Breakpoints inside the sweep, endpoints included.
    std::vector<Breakpoint> breakpoints;

    // Inverse of the input within a strictly monotone sweep.
    double time_at(double u) const {
        if (direction == SweepDirection::stationary) return t_start;
        const bool inc = direction == SweepDirection::increasing;
        auto before = [inc](const Breakpoint& b, double x) { return inc ? b.value < x : b.value > x; };
        auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), u, before);
        if (it == breakpoints.begin()) return breakpoints.front().time;
        if (it == breakpoints.end()) return breakpoints.back().time;
        if (it->value == u) return it->time;
        const auto& lo = *(it - 1);
        return std::lerp(lo.time, it->time, (u - lo.value) / (it->value - lo.value));
    }
};

/// [S_tau v](t) = v(t + tau).
inline InputSignal shift_signal(const InputSignal& s, double tau) {
    if (s.periodic()) {
        const double T = *s.period();
        double phase = tau - std::floor(tau / T) * T;
        if (phase >= T) phase = 0.0;
        if (phase == 0.0) return s;
        auto pts = s.breakpoints_between(phase, phase + T);
        for (auto& p : pts) p.time -= phase;
        pts.front().time = 0.0;
        pts.back() = {T, pts.front().value};
        // Rounding of (t - phase) can collide with a neighbour.
        std::vector<Breakpoint> clean;
        for (const auto& p : pts) {
            if (clean.empty() || p.time > clean.back().time) clean.push_back(p);
        }
        clean.back() = {T, clean.front().value};
        return InputSignal(std::move(clean), true);
    }
    const double end = s.end_time();
    if (!(tau >= 0.0 && tau <= end)) {
        throw InvalidArgument("shift_signal: tau outside [0, end time] for a non-periodic signal");
    }
    if (tau == 0.0) return s;
    std::vector<Breakpoint> pts{{0.0, s(tau)}};
    for (const auto& bp : s.breakpoints()) {
        if (bp.time > tau && bp.time - tau > pts.back().time) pts.push_back({bp.time - tau, bp.value});
    }
    if (pts.size() < 2) pts.push_back({end, pts.front().value});
    return InputSignal(std::move(pts), false);
}

/// [R_tau v](t) = v(t) for t <= tau, v(tau) afterwards. The result is never periodic.
inline InputSignal continue_signal(const InputSignal& s, double tau) {
    if (!(tau >= 0.0) || (!s.periodic() && tau > s.end_time()) || !std::isfinite(tau)) {
        throw InvalidArgument("continue_signal: tau outside the signal's time domain");
    }
    auto pts = s.breakpoints_between(0.0, tau);
    if (pts.size() < 2) pts.push_back({s.end_time(), pts.front().value});
    return InputSignal(std::move(pts), false);
}

/// Splits [0, horizon] into maximal runs of constant direction.
inline std::vector<MonotoneSweep> monotone_partition(const InputSignal& s, double horizon) {
    if (!(horizon > 0.0)) throw InvalidArgument("monotone_partition: horizon must be positive");
    const auto pts = s.breakpoints_between(0.0, horizon);
    auto direction_of = [](double a, double b) {
        if (b > a) return SweepDirection::increasing;
        if (b < a) return SweepDirection::decreasing;
        return SweepDirection::stationary;
    };
    std::vector<MonotoneSweep> sweeps;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto dir = direction_of(pts[i].value, pts[i + 1].value);
        if (!sweeps.empty() && sweeps.back().direction == dir) {
            auto& sw = sweeps.back();
            sw.t_end = pts[i + 1].time;
            sw.u_end = pts[i + 1].value;
            sw.breakpoints.push_back(pts[i + 1]);
        } else {
            sweeps.push_back({dir, pts[i].time, pts[i + 1].time, pts[i].value, pts[i + 1].value,
                              {pts[i], pts[i + 1]}});
        }
    }
    return sweeps;
}

inline InputSignal build_periodic_input(const PeriodicInputSpec& spec) {
    if (!(spec.u_min < spec.u_max)) throw InvalidArgument("periodic input: u_min must be below u_max");
    if (!(spec.t_peak > 0.0 && spec.t_peak < spec.period)) {
        throw InvalidArgument("periodic input: t_peak must lie in (0, period)");
    }
    return InputSignal({{0.0, spec.u_min}, {spec.t_peak, spec.u_max}, {spec.period, spec.u_min}}, true);
}

} // namespace duhem

#endif // DUHEM_SIGNALS_HPP
