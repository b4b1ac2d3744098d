#ifndef DUHEM_CLI_COMMANDS_HPP
#define DUHEM_CLI_COMMANDS_HPP

#include "../accommodation.hpp"
#include "../geometry.hpp"
#include "../integrator.hpp"
#include "../io/config.hpp"
#include "../io/format.hpp"
#include "../io/report.hpp"
#include "../io/svg.hpp"
#include "../models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace duhem::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_divergence = 3, exit_verification = 4 };

/// Points per axis for the sampled condition checks.
inline constexpr std::size_t condition_grid_points = 64;

/// Text produced by a command plus its exit status. `message` goes to stderr.
struct CommandResult {
    std::string output;
    int exit_code = exit_ok;
    std::string message;
};

/// Command-line overrides applied on top of a config file.
struct Overrides {
    std::optional<double> h;
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
};

inline io::RunConfig apply(io::RunConfig c, const Overrides& o) {
    if (o.h) {
        if (!(*o.h > 0.0)) throw io::ConfigError("--h", "step must be positive");
        c.numerics.h = *o.h;
    }
    if (o.tol) {
        if (!(*o.tol > 0.0)) throw io::ConfigError("--tol", "tolerance must be positive");
        c.numerics.tol = *o.tol;
    }
    if (o.max_iter) {
        if (*o.max_iter < 1) throw io::ConfigError("--max-iter", "must be at least 1");
        c.numerics.max_iter = *o.max_iter;
    }
    return c;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulationRun {
    TimeTrajectory trajectory;
    bool diverged = false;
    std::string message;
};

inline SimulationRun run_simulation(const io::RunConfig& c) {
    const auto sig = io::build_input(c.input);
    try {
        return {simulate(c.model, sig, c.y0, io::effective_horizon(c), io::effective_step(c)), false, {}};
    } catch (const NonFiniteState& e) {
        return {e.partial_time(), true, e.what()};
    }
}

inline CommandResult cmd_simulate(const io::RunConfig& c) {
    auto run = run_simulation(c);
    std::ostringstream os;
    io::write_csv(os, run.trajectory);
    if (run.diverged) return {os.str(), exit_divergence, "divergence: " + run.message};
    return {os.str(), exit_ok, {}};
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

inline io::Json conditions_json(const io::RunConfig& c, double lo, double hi) {
    io::Json j = io::Json::object();
    if (const auto* bw = c.model.bouc_wen_params()) j["boucwen_class"] = io::to_string(boucwen_classify(*bw));
    const auto gr = io::effective_gamma_range(c);
    const auto vs = linspace(lo, hi, condition_grid_points);
    const auto gs = linspace(gr[0], gr[1], condition_grid_points);
    io::Json mono = io::Json::object();
    mono["convergent"] = io::monotonicity_to_json(check_output_monotonicity(c.model, MonotonicityMode::convergent, vs, gs));
    mono["strictly_convergent"] =
        io::monotonicity_to_json(check_output_monotonicity(c.model, MonotonicityMode::strictly_convergent, vs, gs));
    mono["divergent"] = io::monotonicity_to_json(check_output_monotonicity(c.model, MonotonicityMode::divergent, vs, gs));
    j["monotonicity"] = std::move(mono);
    const auto wp = check_wellposedness(c.model, vs, gs);
    j["wellposedness"] = {{"satisfied", wp.satisfied},
                          {"lambda1", wp.lambda1_estimate},
                          {"lambda2", wp.lambda2_estimate},
                          {"grid", {{"v", {lo, hi, condition_grid_points}}, {"g", {gr[0], gr[1], condition_grid_points}}}}};
    return j;
}

inline CommandResult cmd_analyze(const io::RunConfig& c) {
    const auto r = io::input_range(c.input);
    if (!(r.lo < r.hi)) throw io::ConfigError("input", "analyze needs an input with u_min < u_max");
    const double h = io::effective_step(c);
    const auto rec = iterate_sequences(c.model, r.lo, r.hi, c.y0, c.numerics.tol, c.numerics.max_iter, h);

    io::Json j = io::Json::object();
    j["name"] = c.name;
    j["model"] = io::model_to_json(c.model);
    j["accommodation"] = io::record_to_json(rec);
    j["conditions"] = conditions_json(c, r.lo, r.hi);
    if (rec.converged()) {
        const auto orbit = orbit_from_record(c.model, rec);
        j["orbit"] = io::analysis_to_json(analyze_loop(orbit), orbit.closure_residual);
    } else {
        j["orbit"] = nullptr;
    }
    if (rec.status == AccommodationStatus::diverged) {
        return {io::dump(j), exit_divergence, "divergence: return sequences escaped at cycle " + std::to_string(rec.diverged_at)};
    }
    return {io::dump(j), exit_ok, {}};
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

inline CommandResult cmd_plot(const io::RunConfig& c) {
    const auto run = run_simulation(c);
    const auto r = io::input_range(c.input);
    io::PlotSpec spec;
    spec.title = c.name.empty() ? "phase plot" : c.name;

    io::PlotSeries traj{"trajectory", {}, io::LineStyle::solid, "#1f4e9e"};
    double y_lo = c.y0, y_hi = c.y0;
    for (const auto& s : run.trajectory.samples) {
        traj.points.push_back({s.u, s.y});
        y_lo = std::min(y_lo, s.y);
        y_hi = std::max(y_hi, s.y);
    }
    spec.series.push_back(std::move(traj));

    if (r.lo < r.hi) {
        const auto vs = linspace(r.lo, r.hi, 401);
        io::PlotSeries anh{"anhysteresis", {}, io::LineStyle::dashed, "#555555"};
        const double half = 4.0 * std::max({1.0, std::abs(y_lo), std::abs(y_hi)});
        for (double v : vs) {
            try {
                anh.points.push_back({v, anhysteresis_at(c.model, v, {-half, half})});
            } catch (const NoSignChange&) {
                anh.points.push_back({v, std::numeric_limits<double>::quiet_NaN()});
            }
        }
        spec.series.push_back(std::move(anh));
        if (const auto* cc = c.model.curve_chasing_params()) {
            io::PlotSeries s1{"c1", {}, io::LineStyle::dotted, "#2e8b57"};
            io::PlotSeries s2{"c2", {}, io::LineStyle::dotted, "#b8860b"};
            for (double v : vs) {
                s1.points.push_back({v, cc->c1(v)});
                s2.points.push_back({v, cc->c2(v)});
            }
            spec.series.push_back(std::move(s1));
            spec.series.push_back(std::move(s2));
        }
    }
    spec.marker = io::Point{io::build_input(c.input)(0.0), c.y0};
    auto svg = io::render_svg(spec);
    if (run.diverged) return {std::move(svg), exit_divergence, "divergence: " + run.message};
    return {std::move(svg), exit_ok, {}};
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Model plus the drive it is exercised under.
struct VerifyTarget {
    std::string label;
    DuhemModel model;
    double u_min;
    double u_max;
    double gamma0 = 0.0;
    double seed_upsilon = -2.0;
};

inline CurveSpec cubic_default_curve() { return CurveSpec::cubic(0.0, 1.0, 0.04); }

inline CurveSpec multiloop_c1() { return {{}, {{10.0, 6.0 * std::numbers::pi, std::numbers::pi / 8.0}}}; }
inline CurveSpec multiloop_c2() { return {{}, {{-8.0, 6.0 * std::numbers::pi, -std::numbers::pi / 8.0}}}; }

inline std::vector<double> parse_params(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw io::ConfigError("--params", "not a number: '" + item + "'");
        }
    }
    return out;
}

inline VerifyTarget builtin_target(const std::string& name, const std::string& params = {}) {
    if (name == "cubic-default") {
        const auto c1 = cubic_default_curve();
        return {name, DuhemModel::curve_chasing(c1, -c1), -5.0, 5.0};
    }
    if (name == "cubic-negated") {
        const auto c1 = cubic_default_curve();
        return {name, DuhemModel::curve_chasing(-c1, c1), -5.0, 5.0};
    }
    if (name == "multiloop") return {name, DuhemModel::curve_chasing(multiloop_c1(), multiloop_c2()), -12.0, 12.0};
    if (name == "boucwen") {
        auto p = params.empty() ? std::vector<double>{1.0, 1.0, 2.0, 1.0} : parse_params(params);
        if (p.size() != 4) throw io::ConfigError("--params", "expected alpha,beta,zeta,n");
        try {
            return {name, DuhemModel::bouc_wen(p[0], p[1], p[2], p[3]), -1.0, 1.0};
        } catch (const InvalidArgument& e) {
            throw io::ConfigError("--params", e.what());
        }
    }
    throw io::ConfigError("--model", "unknown model '" + name + "' (cubic-default, cubic-negated, multiloop, boucwen)");
}

inline VerifyTarget target_from_config(const io::RunConfig& c) {
    const auto r = io::input_range(c.input);
    if (!(r.lo < r.hi)) throw io::ConfigError("input", "verify needs an input with u_min < u_max");
    return {c.name.empty() ? "config" : c.name, c.model, r.lo, r.hi, c.y0};
}

struct SuiteOutcome {
    bool pass = true;
    bool applicable = true;
    io::Json details = io::Json::object();
};

namespace detail {

inline double drive_step(const VerifyTarget& t) { return (t.u_max - t.u_min) / 2000.0; }

inline std::array<double, 2> gamma_window(const VerifyTarget& t) {
    io::RunConfig c;
    c.model = t.model;
    c.input = PeriodicInputSpec{t.u_min, t.u_max, 2.0, 1.0};
    c.y0 = t.gamma0;
    return io::effective_gamma_range(c);
}

inline SuiteOutcome not_applicable(const std::string& why) {
    SuiteOutcome o;
    o.applicable = false;
    o.details["reason"] = why;
    return o;
}

inline bool strictly_convergent(const VerifyTarget& t) {
    const auto gw = gamma_window(t);
    return check_output_monotonicity(t.model, MonotonicityMode::strictly_convergent, linspace(t.u_min, t.u_max, condition_grid_points),
                                     linspace(gw[0], gw[1], condition_grid_points))
        .holds;
}

inline bool divergent(const VerifyTarget& t) {
    const auto gw = gamma_window(t);
    return check_output_monotonicity(t.model, MonotonicityMode::divergent, linspace(t.u_min, t.u_max, condition_grid_points),
                                     linspace(gw[0], gw[1], condition_grid_points))
        .holds;
}

inline std::vector<double> starts(const VerifyTarget& t) {
    const auto gw = gamma_window(t);
    return {gw[0] / 1.5, t.gamma0, gw[1]};
}

} // namespace detail

/// Ten ordered starts swept along both branches stay ordered at every grid point.
inline SuiteOutcome suite_lemma1(const VerifyTarget& t) {
    if (!detail::strictly_convergent(t)) return detail::not_applicable("model fails the strict monotonicity check");
    const auto gw = detail::gamma_window(t);
    const auto gs = linspace(gw[0] / 2.0, gw[1] / 2.0, 10);
    const double h = detail::drive_step(t);
    SuiteOutcome o;
    double worst = -std::numeric_limits<double>::infinity();
    for (Branch b : {Branch::ascending, Branch::descending}) {
        const double from = b == Branch::ascending ? t.u_min : t.u_max;
        const double to = b == Branch::ascending ? t.u_max : t.u_min;
        std::vector<BranchTrajectory> trs;
        for (double g : gs) trs.push_back(sweep(t.model, b, from, to, g, h));
        for (std::size_t i = 0; i + 1 < trs.size(); ++i) {
            for (std::size_t k = 0; k < trs[i].samples.size(); ++k) {
                const double gap = trs[i].samples[k].g - trs[i + 1].samples[k].g;
                worst = std::max(worst, gap);
                if (gap > 1e-9 && o.pass) {
                    o.pass = false;
                    o.details["witness"] = {{"branch", branch_index(b)}, {"pair", i}, {"v", trs[i].samples[k].v}, {"gap", gap}};
                }
            }
        }
    }
    o.details["starts"] = gs;
    o.details["worst_order_gap"] = worst;
    return o;
}

inline SuiteOutcome sequence_suite(const VerifyTarget& t, const std::function<LemmaCheck(const SequenceLemmaReport&)>& pick,
                                   double gamma0) {
    const auto rec = iterate_sequences(t.model, t.u_min, t.u_max, gamma0, default_accommodation_tol,
                                       default_max_cycles, detail::drive_step(t));
    SuiteOutcome o;
    o.details["gamma0"] = gamma0;
    o.details["status"] = io::to_string(rec.status);
    o.details["iterations"] = rec.iterations;
    if (rec.gamma.size() + rec.zeta.size() < 3) return detail::not_applicable("sequence too short to check");
    const auto check = pick(verify_sequence_lemmas(rec));
    o.pass = check.pass;
    o.applicable = check.applicable;
    o.details["detail"] = check.detail;
    if (check.witness_index) o.details["witness_index"] = *check.witness_index;
    return o;
}

inline SuiteOutcome suite_lemma2(const VerifyTarget& t) {
    return sequence_suite(t, [](const SequenceLemmaReport& r) { return r.monotone; }, t.gamma0 + 0.1);
}

inline SuiteOutcome suite_lemma3(const VerifyTarget& t) {
    return sequence_suite(t, [](const SequenceLemmaReport& r) { return r.constant_tail; }, t.gamma0 + 0.1);
}

inline SuiteOutcome suite_lemma4(const VerifyTarget& t) {
    return sequence_suite(t, [](const SequenceLemmaReport& r) { return r.unbounded_pair; }, t.gamma0 + 0.1);
}

inline SuiteOutcome suite_lemma5(const VerifyTarget& t) {
    if (!t.model.curve_chasing_params()) return detail::not_applicable("needs a curve-chasing model");
    const double h = detail::drive_step(t);
    SuiteOutcome o;
    try {
        const auto up = verify_invariance(t.model, Branch::ascending, t.u_min, t.u_max, h);
        const auto down = verify_invariance(t.model, Branch::descending, t.u_max, t.u_min, h);
        o.pass = up.pass && down.pass;
        o.details["branch1"] = {{"pass", up.pass}, {"worst_violation", up.worst_violation}, {"witness_v", up.witness_v}};
        o.details["branch2"] = {{"pass", down.pass}, {"worst_violation", down.worst_violation}, {"witness_v", down.witness_v}};
    } catch (const HypothesisViolated& e) {
        return detail::not_applicable(e.what());
    }
    return o;
}

inline SuiteOutcome suite_lemma6(const VerifyTarget& t) {
    const auto* cc = t.model.curve_chasing_params();
    if (!cc) return detail::not_applicable("needs a curve-chasing model");
    const double h = detail::drive_step(t), span = 30.0, v = t.seed_upsilon;
    SuiteOutcome o;
    if (slope_range(cc->c1, v - span, v + span).min < 0.0 || slope_range(cc->c2, v - span, v + span).max > 0.0) {
        return detail::not_applicable("curve slope signs fail on the working interval");
    }
    const auto back = extend_to_crossing(t.model, Branch::ascending, v, cc->c1(v), cc->c2, CrossingDirection::backward,
                                         v - span, h);
    // Mirror: falling branch seeded on c2, run forward in v until it meets c1.
    const double vm = -v;
    const auto fwd = extend_to_crossing(t.model, Branch::descending, vm, cc->c2(vm), cc->c1, CrossingDirection::forward,
                                        vm + span, h);
    o.pass = back && back->v < v && fwd && fwd->v > vm;
    o.details["seed"] = v;
    o.details["backward_crossing"] = back ? io::Json{{"v", back->v}, {"g", back->g}} : io::Json();
    o.details["mirror_seed"] = vm;
    o.details["mirror_crossing"] = fwd ? io::Json{{"v", fwd->v}, {"g", fwd->g}} : io::Json();
    return o;
}

inline SuiteOutcome suite_prop1(const VerifyTarget& t) {
    const auto gw = detail::gamma_window(t);
    const auto verdict = check_output_monotonicity(t.model, MonotonicityMode::convergent, linspace(t.u_min, t.u_max, condition_grid_points),
                                                   linspace(gw[0], gw[1], condition_grid_points));
    if (!verdict.holds) return detail::not_applicable("convergence conditions fail on the sampled grid");
    const auto rec = iterate_sequences(t.model, t.u_min, t.u_max, t.gamma0, default_accommodation_tol,
                                       default_max_cycles, detail::drive_step(t));
    SuiteOutcome o;
    o.details["gamma0"] = t.gamma0;
    o.details["status"] = io::to_string(rec.status);
    o.details["iterations"] = rec.iterations;
    o.pass = rec.converged();
    if (rec.converged()) {
        const auto orbit = orbit_from_record(t.model, rec);
        o.details["gamma_star"] = rec.gamma_star;
        o.details["zeta_star"] = rec.zeta_star;
        o.details["closure_residual"] = orbit.closure_residual;
        o.pass = orbit.closure_residual <= 1e-6;
    }
    return o;
}

inline SuiteOutcome suite_prop2(const VerifyTarget& t) {
    if (!detail::strictly_convergent(t)) return detail::not_applicable("model fails the strict monotonicity check");
    SuiteOutcome o;
    std::vector<double> limits;
    io::Json runs = io::Json::array();
    for (double g0 : detail::starts(t)) {
        const auto rec = iterate_sequences(t.model, t.u_min, t.u_max, g0, default_accommodation_tol,
                                           default_max_cycles, detail::drive_step(t));
        runs.push_back({{"gamma0", g0}, {"status", io::to_string(rec.status)}, {"gamma_star", rec.gamma_star}});
        if (!rec.converged()) o.pass = false;
        else limits.push_back(rec.gamma_star);
    }
    double spread = 0.0;
    if (!limits.empty()) spread = *std::max_element(limits.begin(), limits.end()) - *std::min_element(limits.begin(), limits.end());
    o.pass = o.pass && spread <= 1e-6;
    o.details["runs"] = std::move(runs);
    o.details["spread"] = spread;
    return o;
}

inline SuiteOutcome suite_prop3(const VerifyTarget& t) {
    if (!t.model.curve_chasing_params()) return detail::not_applicable("needs a curve-chasing model");
    SuiteOutcome o;
    try {
        const auto b = construct_butterfly(t.model, t.seed_upsilon, 0.5, 0.005);
        o.pass = b.ordered() && b.max_residual() <= 1e-6;
        o.details = io::butterfly_to_json(b);
    } catch (const HypothesisViolated& e) {
        return detail::not_applicable(e.what());
    } catch (const EpsilonExhausted& e) {
        o.pass = false;
        o.details["error"] = e.what();
    }
    return o;
}

inline SuiteOutcome suite_cor1(const VerifyTarget& t) {
    if (!detail::divergent(t)) return detail::not_applicable("divergence conditions fail on the sampled grid");
    const double g0 = t.gamma0 == 0.0 ? 0.1 : t.gamma0;
    const auto rec = iterate_sequences(t.model, t.u_min, t.u_max, g0, default_accommodation_tol,
                                       default_max_cycles, detail::drive_step(t));
    SuiteOutcome o;
    bool increasing = true;
    for (std::size_t i = 0; i + 1 < rec.gamma.size(); ++i) increasing = increasing && std::abs(rec.gamma[i + 1]) > std::abs(rec.gamma[i]);
    o.pass = rec.status == AccommodationStatus::diverged && increasing;
    o.details["gamma0"] = g0;
    o.details["status"] = io::to_string(rec.status);
    o.details["diverged_at"] = rec.diverged_at;
    o.details["abs_gamma_strictly_increasing"] = increasing;
    return o;
}

inline SuiteOutcome suite_wellposed(const VerifyTarget& t) {
    const auto gw = detail::gamma_window(t);
    const auto wp = check_wellposedness(t.model, linspace(t.u_min, t.u_max, condition_grid_points), linspace(gw[0], gw[1], condition_grid_points));
    SuiteOutcome o;
    o.pass = wp.satisfied;
    o.details = {{"lambda1", wp.lambda1_estimate}, {"lambda2", wp.lambda2_estimate}};
    return o;
}

struct SuiteEntry {
    const char* id;
    const char* title;
    SuiteOutcome (*run)(const VerifyTarget&);
};

inline const std::vector<SuiteEntry>& suites() {
    static const std::vector<SuiteEntry> all{
        {"lemma1", "branch trajectories never cross", suite_lemma1},
        {"lemma2", "return sequences are monotone in the same direction", suite_lemma2},
        {"lemma3", "a vanishing gap stays vanished", suite_lemma3},
        {"lemma4", "one sequence unbounded iff the other", suite_lemma4},
        {"lemma5", "region below the level curve is invariant", suite_lemma5},
        {"lemma6", "backward extension meets the other level curve", suite_lemma6},
        {"prop1", "accommodation under the convergence conditions", suite_prop1},
        {"prop2", "unique limit from independent starts", suite_prop2},
        {"prop3", "butterfly construction", suite_prop3},
        {"cor1", "divergence under the reversed conditions", suite_cor1},
        {"wellposed", "one-sided Lipschitz bounds", suite_wellposed},
    };
    return all;
}

inline CommandResult cmd_verify(const std::string& suite, const VerifyTarget& t) {
    std::vector<const SuiteEntry*> chosen;
    for (const auto& s : suites()) {
        if (suite == "all" || suite == s.id) chosen.push_back(&s);
    }
    if (chosen.empty()) throw io::ConfigError("suite", "unknown suite id '" + suite + "'");

    io::Json j = io::Json::object();
    j["model"] = io::model_to_json(t.model);
    j["label"] = t.label;
    j["drive"] = {t.u_min, t.u_max};
    io::Json results = io::Json::array();
    bool all_pass = true;
    for (const auto* s : chosen) {
        SuiteOutcome o;
        try {
            o = s->run(t);
        } catch (const NonFiniteState& e) {
            o.pass = false;
            o.details["error"] = e.what();
        }
        all_pass = all_pass && o.pass;
        results.push_back({{"id", s->id}, {"title", s->title}, {"pass", o.pass}, {"applicable", o.applicable},
                           {"details", std::move(o.details)}});
    }
    j["results"] = std::move(results);
    j["pass"] = all_pass;
    if (!all_pass) return {io::dump(j), exit_verification, "verification failed"};
    return {io::dump(j), exit_ok, {}};
}

} // namespace duhem::cli

#endif // DUHEM_CLI_COMMANDS_HPP
