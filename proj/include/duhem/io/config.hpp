#ifndef DUHEM_IO_CONFIG_HPP
#define DUHEM_IO_CONFIG_HPP

#include "../errors.hpp"
#include "../models.hpp"
#include "../signals.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace duhem::io {

using Json = nlohmann::ordered_json;

/// Bad configuration text or field. `location` is "line L, column C" or a field path.
class ConfigError : public Error {
public:
    ConfigError(std::string location, const std::string& msg)
        : Error(location + ": " + msg), location_(std::move(location)) {}
    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

struct BreakpointInput {
    std::vector<Breakpoint> points;
    bool periodic = false;

    friend bool operator==(const BreakpointInput&, const BreakpointInput&) = default;
};

using InputSpec = std::variant<PeriodicInputSpec, BreakpointInput>;

struct Numerics {
    std::optional<double> h; // default: input span / 2000
    double tol = 1e-8;
    std::size_t max_iter = 500;
    std::optional<double> periods; // simulation length in periods (periodic inputs)
    std::optional<double> horizon; // simulation length in time; wins over periods
    std::optional<std::array<double, 2>> gamma_range;

    friend bool operator==(const Numerics&, const Numerics&) = default;
};

struct Outputs {
    std::optional<std::string> csv;
    std::optional<std::string> json;
    std::optional<std::string> svg;

    friend bool operator==(const Outputs&, const Outputs&) = default;
};

struct RunConfig {
    std::string name;
    DuhemModel model = DuhemModel::bouc_wen(1.0, 1.0, 2.0, 1.0);
    InputSpec input = PeriodicInputSpec{-1.0, 1.0, 2.0, 1.0};
    double y0 = 0.0;
    Numerics numerics;
    Outputs outputs;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline InputSignal build_input(const InputSpec& in) {
    if (const auto* p = std::get_if<PeriodicInputSpec>(&in)) return build_periodic_input(*p);
    const auto& b = std::get<BreakpointInput>(in);
    return InputSignal(b.points, b.periodic);
}

struct InputRange {
    double lo;
    double hi;
};

inline InputRange input_range(const InputSpec& in) {
    if (const auto* p = std::get_if<PeriodicInputSpec>(&in)) return {p->u_min, p->u_max};
    const auto& pts = std::get<BreakpointInput>(in).points;
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                              [](const auto& a, const auto& b) { return a.value < b.value; });
    return {lo->value, hi->value};
}

inline double effective_step(const RunConfig& c) {
    if (c.numerics.h) return *c.numerics.h;
    const auto r = input_range(c.input);
    const double span = r.hi - r.lo;
    return span > 0.0 ? span / 2000.0 : 1e-3;
}

inline double effective_horizon(const RunConfig& c) {
    if (c.numerics.horizon) return *c.numerics.horizon;
    const auto sig = build_input(c.input);
    if (sig.periodic()) return c.numerics.periods.value_or(1.0) * *sig.period();
    return sig.end_time();
}

/// Output window for plots and monotonicity grids.
inline std::array<double, 2> effective_gamma_range(const RunConfig& c) {
    if (c.numerics.gamma_range) return *c.numerics.gamma_range;
    double w = std::max(3.0, 2.0 * std::abs(c.y0));
    if (const auto* cc = c.model.curve_chasing_params()) {
        const auto r = input_range(c.input);
        for (double v : linspace(r.lo, r.hi, 201)) w = std::max({w, 2.0 * std::abs(cc->c1(v)), 2.0 * std::abs(cc->c2(v))});
    }
    return {-w, w};
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

inline Json curve_to_json(const CurveSpec& c) {
    Json j = Json::object();
    j["poly"] = c.poly;
    Json sins = Json::array();
    for (const auto& s : c.sinusoids) sins.push_back({s.amplitude, s.frequency, s.phase});
    j["sin"] = std::move(sins);
    return j;
}

inline Json model_to_json(const DuhemModel& m) {
    if (const auto* bw = m.bouc_wen_params()) {
        return {{"type", "bouc_wen"}, {"alpha", bw->alpha}, {"beta", bw->beta}, {"zeta", bw->zeta}, {"n", bw->n}};
    }
    const auto& cc = *m.curve_chasing_params();
    return {{"type", "curve_chasing"}, {"gain", cc.gain}, {"c1", curve_to_json(cc.c1)}, {"c2", curve_to_json(cc.c2)}};
}

inline Json input_to_json(const InputSpec& in) {
    if (const auto* p = std::get_if<PeriodicInputSpec>(&in)) {
        return {{"type", "periodic"}, {"u_min", p->u_min}, {"u_max", p->u_max}, {"period", p->period},
                {"t_peak", p->t_peak}};
    }
    const auto& b = std::get<BreakpointInput>(in);
    Json pts = Json::array();
    for (const auto& p : b.points) pts.push_back({p.time, p.value});
    return {{"type", "breakpoints"}, {"points", std::move(pts)}, {"periodic", b.periodic}};
}

inline Json config_to_json(const RunConfig& c) {
    Json j = Json::object();
    j["name"] = c.name;
    j["model"] = model_to_json(c.model);
    j["input"] = input_to_json(c.input);
    j["y0"] = c.y0;
    Json num = Json::object();
    if (c.numerics.h) num["h"] = *c.numerics.h;
    num["tol"] = c.numerics.tol;
    num["max_iter"] = c.numerics.max_iter;
    if (c.numerics.periods) num["periods"] = *c.numerics.periods;
    if (c.numerics.horizon) num["horizon"] = *c.numerics.horizon;
    if (c.numerics.gamma_range) num["gamma_range"] = *c.numerics.gamma_range;
    j["numerics"] = std::move(num);
    Json out = Json::object();
    if (c.outputs.csv) out["csv"] = *c.outputs.csv;
    if (c.outputs.json) out["json"] = *c.outputs.json;
    if (c.outputs.svg) out["svg"] = *c.outputs.svg;
    j["outputs"] = std::move(out);
    return j;
}

inline std::string emit_config(const RunConfig& c) { return config_to_json(c).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

inline const Json& field(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "missing field");
    return *it;
}

inline double number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
    return x;
}

inline double number_field(const Json& obj, const std::string& key, const std::string& path) {
    return number(field(obj, key, path), join(path, key));
}

inline std::optional<double> optional_number(const Json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return number(*it, join(path, key));
}

inline std::optional<std::string> optional_string(const Json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ConfigError(join(path, key), "expected a string");
    return it->get<std::string>();
}

inline std::string string_field(const Json& obj, const std::string& key, const std::string& path) {
    const auto& j = field(obj, key, path);
    if (!j.is_string()) throw ConfigError(join(path, key), "expected a string");
    return j.get<std::string>();
}

inline CurveSpec parse_curve(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object with 'poly' and/or 'sin'");
    CurveSpec c;
    if (const auto it = j.find("poly"); it != j.end()) {
        if (!it->is_array()) throw ConfigError(path + ".poly", "expected an array of numbers");
        for (std::size_t i = 0; i < it->size(); ++i) c.poly.push_back(number((*it)[i], path + ".poly[" + std::to_string(i) + "]"));
    }
    if (const auto it = j.find("sin"); it != j.end()) {
        if (!it->is_array()) throw ConfigError(path + ".sin", "expected an array of [amplitude, frequency, phase]");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto p = path + ".sin[" + std::to_string(i) + "]";
            const auto& t = (*it)[i];
            if (!t.is_array() || t.size() != 3) throw ConfigError(p, "expected [amplitude, frequency, phase]");
            c.sinusoids.push_back({number(t[0], p + "[0]"), number(t[1], p + "[1]"), number(t[2], p + "[2]")});
        }
    }
    if (c.poly.empty() && c.sinusoids.empty()) throw ConfigError(path, "curve has no terms");
    return c;
}

inline DuhemModel parse_model(const Json& j) {
    const std::string path = "model";
    const auto type = string_field(j, "type", path);
    try {
        if (type == "bouc_wen") {
            return DuhemModel::bouc_wen(number_field(j, "alpha", path), number_field(j, "beta", path),
                                        number_field(j, "zeta", path), number_field(j, "n", path));
        }
        if (type == "curve_chasing") {
            const double gain = optional_number(j, "gain", path).value_or(1.0);
            return DuhemModel::curve_chasing(parse_curve(field(j, "c1", path), path + ".c1"),
                                             parse_curve(field(j, "c2", path), path + ".c2"), gain);
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path + ".type", "unknown model type '" + type + "' (expected bouc_wen or curve_chasing)");
}

inline InputSpec parse_input(const Json& j) {
    const std::string path = "input";
    const auto type = string_field(j, "type", path);
    if (type == "periodic") {
        PeriodicInputSpec p{number_field(j, "u_min", path), number_field(j, "u_max", path),
                            number_field(j, "period", path), number_field(j, "t_peak", path)};
        try {
            build_periodic_input(p);
        } catch (const InvalidArgument& e) {
            throw ConfigError(path, e.what());
        }
        return p;
    }
    if (type == "breakpoints") {
        BreakpointInput b;
        const auto& pts = field(j, "points", path);
        if (!pts.is_array()) throw ConfigError(path + ".points", "expected an array of [t, u] pairs");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto p = path + ".points[" + std::to_string(i) + "]";
            if (!pts[i].is_array() || pts[i].size() != 2) throw ConfigError(p, "expected [t, u]");
            b.points.push_back({number(pts[i][0], p + "[0]"), number(pts[i][1], p + "[1]")});
        }
        if (const auto it = j.find("periodic"); it != j.end()) {
            if (!it->is_boolean()) throw ConfigError(path + ".periodic", "expected true or false");
            b.periodic = it->get<bool>();
        }
        try {
            InputSignal(b.points, b.periodic);
        } catch (const InvalidArgument& e) {
            throw ConfigError(path + ".points", e.what());
        }
        return b;
    }
    throw ConfigError(path + ".type", "unknown input type '" + type + "' (expected periodic or breakpoints)");
}

inline Numerics parse_numerics(const Json& j) {
    const std::string path = "numerics";
    Numerics n;
    if (j.is_null()) return n;
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    n.h = optional_number(j, "h", path);
    if (n.h && !(*n.h > 0.0)) throw ConfigError(path + ".h", "step must be positive");
    n.tol = optional_number(j, "tol", path).value_or(n.tol);
    if (!(n.tol > 0.0)) throw ConfigError(path + ".tol", "tolerance must be positive");
    if (const auto it = j.find("max_iter"); it != j.end()) {
        if (!it->is_number_integer() || it->get<long long>() < 1) {
            throw ConfigError(path + ".max_iter", "expected a positive integer");
        }
        n.max_iter = it->get<std::size_t>();
    }
    n.periods = optional_number(j, "periods", path);
    if (n.periods && !(*n.periods > 0.0)) throw ConfigError(path + ".periods", "must be positive");
    n.horizon = optional_number(j, "horizon", path);
    if (n.horizon && !(*n.horizon > 0.0)) throw ConfigError(path + ".horizon", "must be positive");
    if (const auto it = j.find("gamma_range"); it != j.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 2) throw ConfigError(path + ".gamma_range", "expected [lo, hi]");
        const double lo = number((*it)[0], path + ".gamma_range[0]"), hi = number((*it)[1], path + ".gamma_range[1]");
        if (!(lo < hi)) throw ConfigError(path + ".gamma_range", "lo must be below hi");
        n.gamma_range = std::array<double, 2>{lo, hi};
    }
    return n;
}

inline std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace detail

inline RunConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
    RunConfig c;
    c.name = detail::optional_string(j, "name", "").value_or("");
    c.model = detail::parse_model(detail::field(j, "model", ""));
    c.input = detail::parse_input(detail::field(j, "input", ""));
    c.y0 = j.contains("y0") ? detail::number(j["y0"], "y0") : 0.0;
    c.numerics = detail::parse_numerics(j.contains("numerics") ? j["numerics"] : Json());
    if (const auto it = j.find("outputs"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) throw ConfigError("outputs", "expected an object");
        c.outputs.csv = detail::optional_string(*it, "csv", "outputs");
        c.outputs.json = detail::optional_string(*it, "json", "outputs");
        c.outputs.svg = detail::optional_string(*it, "svg", "outputs");
    }
    return c;
}

inline RunConfig parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        std::string msg = e.what();
        if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
        throw ConfigError(detail::line_column(text, at), msg);
    }
    return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.location(), std::string(e.what()).substr(e.location().size() + 2));
    }
}

} // namespace duhem::io

#endif // DUHEM_IO_CONFIG_HPP
