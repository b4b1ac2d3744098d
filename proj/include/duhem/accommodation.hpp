#ifndef DUHEM_ACCOMMODATION_HPP
#define DUHEM_ACCOMMODATION_HPP

#include "errors.hpp"
#include "integrator.hpp"
#include "models.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace duhem {

inline constexpr double default_accommodation_tol = 1e-8;
inline constexpr std::size_t default_max_cycles = 500;
/// |gamma_n| or |zeta_n| beyond this at the end of a cycle counts as divergence.
inline constexpr double sequence_divergence_bound = 1e6;

/// Default input-grid step: 1/2000 of the input span.
inline double default_step(double u_min, double u_max) { return (u_max - u_min) / 2000.0; }

enum class AccommodationStatus { converged, diverged, max_iter_reached };

/// Return sequences under a simple periodic input starting at u_min:
///   zeta_n      = ascending sweep u_min -> u_max from gamma_n
///   gamma_{n+1} = descending sweep u_max -> u_min from zeta_n
struct AccommodationRecord {
    std::vector<double> gamma;
    std::vector<double> zeta;
    AccommodationStatus status = AccommodationStatus::max_iter_reached;
    double gamma_star = std::numeric_limits<double>::quiet_NaN();
    double zeta_star = std::numeric_limits<double>::quiet_NaN();
    std::size_t diverged_at = 0; // cycle index where divergence was declared
    std::size_t iterations = 0;  // completed cycles
    double tol = default_accommodation_tol;
    double divergence_bound = sequence_divergence_bound;
    double u_min = 0.0;
    double u_max = 0.0;
    double step = 0.0;

    bool converged() const { return status == AccommodationStatus::converged; }
};

inline AccommodationRecord iterate_sequences(const DuhemModel& m, double u_min, double u_max, double gamma0,
                                             double tol = default_accommodation_tol,
                                             std::size_t max_iter = default_max_cycles, double h = 0.0) {
    if (!(u_min < u_max)) throw InvalidArgument("iterate_sequences: u_min must be below u_max");
    if (max_iter < 1) throw InvalidArgument("iterate_sequences: max_iter must be at least 1");
    if (h <= 0.0) h = default_step(u_min, u_max);

    AccommodationRecord rec;
    rec.tol = tol;
    rec.u_min = u_min;
    rec.u_max = u_max;
    rec.step = h;
    rec.gamma.push_back(gamma0);

    auto diverge = [&rec](std::size_t at) {
        rec.status = AccommodationStatus::diverged;
        rec.diverged_at = at;
    };

    for (std::size_t n = 0; n < max_iter; ++n) {
        double zeta_n = 0.0, gamma_next = 0.0;
        try {
            zeta_n = sweep(m, Branch::ascending, u_min, u_max, rec.gamma[n], h).back().g;
        } catch (const NonFiniteState&) {
            diverge(n);
            return rec;
        }
        rec.zeta.push_back(zeta_n);
        try {
            gamma_next = sweep(m, Branch::descending, u_max, u_min, zeta_n, h).back().g;
        } catch (const NonFiniteState&) {
            diverge(n);
            return rec;
        }
        rec.gamma.push_back(gamma_next);
        rec.iterations = n + 1;

        if (std::abs(gamma_next) > rec.divergence_bound || std::abs(zeta_n) > rec.divergence_bound) {
            diverge(n + 1);
            // One more rising half-cycle so both sequences report their escape.
            if (std::abs(zeta_n) <= rec.divergence_bound) {
                try {
                    rec.zeta.push_back(sweep(m, Branch::ascending, u_min, u_max, gamma_next, h).back().g);
                } catch (const NonFiniteState&) {
                }
            }
            return rec;
        }
        if (n >= 1 && std::abs(gamma_next - rec.gamma[n]) <= tol && std::abs(zeta_n - rec.zeta[n - 1]) <= tol) {
            rec.status = AccommodationStatus::converged;
            rec.gamma_star = gamma_next;
            rec.zeta_star = zeta_n;
            return rec;
        }
    }
    rec.status = AccommodationStatus::max_iter_reached;
    return rec;
}

/// gamma' - gamma after one full cycle from gamma. A blow-up returns +/-infinity
/// in the direction the output escaped.
inline double return_map_residual(const DuhemModel& m, double u_min, double u_max, double gamma, double h = 0.0) {
    if (!(u_min < u_max)) throw InvalidArgument("return_map_residual: u_min must be below u_max");
    if (h <= 0.0) h = default_step(u_min, u_max);
    auto escaped = [gamma](const NonFiniteState& e) {
        const auto& p = e.partial_branch().samples;
        const double last = p.empty() ? gamma : p.back().g;
        return last >= gamma ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    };
    double zeta = 0.0;
    try {
        zeta = sweep(m, Branch::ascending, u_min, u_max, gamma, h).back().g;
    } catch (const NonFiniteState& e) {
        return escaped(e);
    }
    try {
        return sweep(m, Branch::descending, u_max, u_min, zeta, h).back().g - gamma;
    } catch (const NonFiniteState& e) {
        return escaped(e);
    }
}

/// The periodic orbit formed by the two branches through (gamma*, zeta*).
struct ClosedOrbit {
    BranchTrajectory ascending;  // u_min -> u_max from gamma*
    BranchTrajectory descending; // u_max -> u_min from zeta*
    double closure_residual = 0.0;
};

class NotConverged : public Error {
public:
    explicit NotConverged(AccommodationRecord rec)
        : Error("periodic orbit not reached: accommodation sequence did not converge"), record_(std::move(rec)) {}
    const AccommodationRecord& record() const noexcept { return record_; }

private:
    AccommodationRecord record_;
};

inline ClosedOrbit orbit_from_record(const DuhemModel& m, const AccommodationRecord& rec) {
    if (!rec.converged()) throw NotConverged(rec);
    ClosedOrbit orbit;
    orbit.ascending = sweep(m, Branch::ascending, rec.u_min, rec.u_max, rec.gamma_star, rec.step);
    orbit.descending = sweep(m, Branch::descending, rec.u_max, rec.u_min, rec.zeta_star, rec.step);
    orbit.closure_residual = std::max(std::abs(orbit.ascending.back().g - rec.zeta_star),
                                      std::abs(orbit.descending.back().g - rec.gamma_star));
    return orbit;
}

inline ClosedOrbit find_periodic_orbit(const DuhemModel& m, double u_min, double u_max, double gamma0,
                                       double tol = default_accommodation_tol,
                                       std::size_t max_iter = default_max_cycles, double h = 0.0) {
    return orbit_from_record(m, iterate_sequences(m, u_min, u_max, gamma0, tol, max_iter, h));
}

struct LemmaCheck {
    bool pass = true;
    bool applicable = true;
    std::string detail;
    std::optional<std::size_t> witness_index;
};

struct SequenceLemmaReport {
    LemmaCheck monotone;       // both sequences monotone in the same direction
    LemmaCheck constant_tail;  // a vanishing gap stays vanished
    LemmaCheck unbounded_pair; // one unbounded iff the other, both strictly monotone

    bool all_pass() const { return monotone.pass && constant_tail.pass && unbounded_pair.pass; }
};

namespace detail {

// +1 / -1 for a monotone sequence, 0 if flat within tol; nullopt with the
// offending index if it changes direction.
struct Trend {
    int direction = 0;
    std::optional<std::size_t> violation;
};

inline Trend trend_of(const std::vector<double>& xs, double tol) {
    Trend t;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double d = xs[i + 1] - xs[i];
        if (std::abs(d) <= tol) continue;
        const int s = d > 0 ? 1 : -1;
        if (t.direction == 0) t.direction = s;
        else if (s != t.direction) {
            t.violation = i;
            return t;
        }
    }
    return t;
}

inline bool strictly_monotone(const std::vector<double>& xs, int direction) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if ((xs[i + 1] - xs[i]) * direction <= 0.0) return false;
    }
    return true;
}

} // namespace detail

inline SequenceLemmaReport verify_sequence_lemmas(const AccommodationRecord& rec) {
    if (rec.gamma.size() + rec.zeta.size() < 3) {
        throw InvalidArgument("verify_sequence_lemmas: record needs at least 3 entries");
    }
    constexpr double flat = 1e-9;
    SequenceLemmaReport rep;

    const auto tg = detail::trend_of(rec.gamma, flat);
    const auto tz = detail::trend_of(rec.zeta, flat);
    if (tg.violation) {
        rep.monotone = {false, true, "gamma changes direction", tg.violation};
    } else if (tz.violation) {
        rep.monotone = {false, true, "zeta changes direction", tz.violation};
    } else if (tg.direction != 0 && tz.direction != 0 && tg.direction != tz.direction) {
        rep.monotone = {false, true, "gamma and zeta move in opposite directions", std::nullopt};
    } else {
        rep.monotone.detail = "monotone in the same direction";
    }

    std::optional<std::size_t> settled;
    for (std::size_t i = 0; i + 1 < rec.gamma.size(); ++i) {
        if (std::abs(rec.gamma[i + 1] - rec.gamma[i]) <= rec.tol) {
            settled = i;
            break;
        }
    }
    if (!settled) {
        rep.constant_tail = {true, false, "no gap within tolerance", std::nullopt};
    } else {
        rep.constant_tail.detail = "settled at index " + std::to_string(*settled);
        for (std::size_t j = *settled; j + 1 < rec.gamma.size(); ++j) {
            if (std::abs(rec.gamma[j + 1] - rec.gamma[j]) > rec.tol) {
                rep.constant_tail = {false, true, "gamma gap reopened", j};
                break;
            }
        }
        for (std::size_t j = *settled; rep.constant_tail.pass && j + 1 < rec.zeta.size(); ++j) {
            if (std::abs(rec.zeta[j + 1] - rec.zeta[j]) > rec.tol) {
                rep.constant_tail = {false, true, "zeta gap reopened", j};
            }
        }
    }

    auto escapes = [&](const std::vector<double>& xs) {
        for (double x : xs) {
            if (std::abs(x) > rec.divergence_bound) return true;
        }
        return false;
    };
    const bool g_out = escapes(rec.gamma), z_out = escapes(rec.zeta);
    if (!g_out && !z_out) {
        rep.unbounded_pair = {true, false, "both sequences bounded", std::nullopt};
    } else if (g_out != z_out) {
        rep.unbounded_pair = {false, true, g_out ? "gamma escaped but zeta did not" : "zeta escaped but gamma did not",
                              std::nullopt};
    } else {
        const int dir = rec.gamma.back() > rec.gamma.front() ? 1 : -1;
        if (!detail::strictly_monotone(rec.gamma, dir) || !detail::strictly_monotone(rec.zeta, dir)) {
            rep.unbounded_pair = {false, true, "escaping sequences are not strictly monotone together",
                                  std::nullopt};
        } else {
            rep.unbounded_pair.detail = "both escape, strictly monotone";
        }
    }
    return rep;
}

} // namespace duhem

#endif // DUHEM_ACCOMMODATION_HPP
