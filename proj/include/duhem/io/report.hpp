#ifndef DUHEM_IO_REPORT_HPP
#define DUHEM_IO_REPORT_HPP

#include "../accommodation.hpp"
#include "../geometry.hpp"
#include "../models.hpp"
#include "config.hpp"

#include <string>

namespace duhem::io {

inline std::string to_string(AccommodationStatus s) {
    switch (s) {
    case AccommodationStatus::converged: return "Converged";
    case AccommodationStatus::diverged: return "Diverged";
    case AccommodationStatus::max_iter_reached: return "MaxIterReached";
    }
    return "?";
}

inline std::string to_string(LoopClass c) {
    switch (c) {
    case LoopClass::simple_cw: return "SimpleCW";
    case LoopClass::simple_ccw: return "SimpleCCW";
    case LoopClass::butterfly: return "Butterfly";
    case LoopClass::multi_loop: return "MultiLoop";
    case LoopClass::degenerate: return "Degenerate";
    }
    return "?";
}

inline std::string to_string(BoucWenClass c) {
    switch (c) {
    case BoucWenClass::convergence_certified: return "ConvergenceCertified";
    case BoucWenClass::divergence_certified: return "DivergenceCertified";
    case BoucWenClass::indeterminate: return "Indeterminate";
    }
    return "?";
}

inline std::string to_string(Orientation o) { return o == Orientation::clockwise ? "CW" : "CCW"; }

inline Json record_to_json(const AccommodationRecord& r) {
    Json j = Json::object();
    j["status"] = to_string(r.status);
    j["iterations"] = r.iterations;
    j["tol"] = r.tol;
    j["u_min"] = r.u_min;
    j["u_max"] = r.u_max;
    j["step"] = r.step;
    j["gamma_star"] = r.converged() ? Json(r.gamma_star) : Json();
    j["zeta_star"] = r.converged() ? Json(r.zeta_star) : Json();
    j["diverged_at"] = r.status == AccommodationStatus::diverged ? Json(r.diverged_at) : Json();
    j["gamma"] = r.gamma;
    j["zeta"] = r.zeta;
    return j;
}

inline Json monotonicity_to_json(const MonotonicityVerdict& v) {
    Json j = {{"holds", v.holds}};
    if (v.witness) {
        j["witness"] = {{"branch", branch_index(v.witness->branch)}, {"v", v.witness->v}, {"g1", v.witness->g1},
                        {"g2", v.witness->g2}, {"product", v.witness->product}};
    }
    return j;
}

inline Json analysis_to_json(const LoopAnalysis& a, double closure_residual) {
    Json j = Json::object();
    j["closure_residual"] = closure_residual;
    j["loop_class"] = to_string(a.loop_class);
    j["signed_area"] = a.signed_area;
    j["enclosed_area"] = a.enclosed_area;
    j["tangential_contacts"] = a.tangential_contacts;
    Json xs = Json::array();
    for (const auto& x : a.intersections) xs.push_back({{"v", x.v}, {"g", x.g}});
    j["intersections"] = std::move(xs);
    Json lobes = Json::array();
    for (const auto& l : a.lobes) lobes.push_back({{"signed_area", l.signed_area}, {"orientation", to_string(l.orientation)}});
    j["lobes"] = std::move(lobes);
    return j;
}

inline Json butterfly_to_json(const ButterflyConstruction& b) {
    return {{"v_a_plus", b.v_a_plus},   {"v_b_plus", b.v_b_plus},   {"v_c_plus", b.v_c_plus},
            {"epsilon", b.epsilon},     {"v_a_minus", b.v_a_minus}, {"v_b_minus", b.v_b_minus},
            {"v_x", b.v_x},             {"v_min", b.v_min},         {"v_max", b.v_max},
            {"residual_x", b.residual_x}, {"residual_min", b.residual_min}, {"residual_max", b.residual_max},
            {"ordered", b.ordered()}};
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace duhem::io

#endif // DUHEM_IO_REPORT_HPP
