#include "dbarlab/reports.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace dbarlab {

using nlohmann::json;

Assertion check_at_most(std::string name, double value, double limit) {
    return {std::move(name), value, limit, false, value <= limit};
}

Assertion check_at_least(std::string name, double value, double limit) {
    return {std::move(name), value, limit, true, value >= limit};
}

Assertion check_true(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, true, ok}; }

json to_json(const Assertion& a) {
    return {{"name", a.name},
            {"value", a.value},
            {"limit", a.limit},
            {"relation", a.at_least ? ">=" : "<="},
            {"passed", a.passed}};
}

json to_json(const SolveReport& r) {
    json j = {{"iterations", r.iterations}, {"residual", r.residual}, {"u_norm", r.u_norm},
              {"data_norm", r.data_norm},   {"ratio", r.ratio},       {"converged", r.converged},
              {"precheck", r.precheck},     {"unknowns", r.unknowns}, {"constraints", r.constraints}};
    if (r.k) j["k"] = *r.k;
    return j;
}

json to_json(const DecayReport& r) {
    json rows = json::array();
    for (const DecayRow& row : r.rows) {
        rows.push_back({{"k", row.k},
                        {"tail", row.tail},
                        {"ratio", row.ratio},
                        {"mass", row.mass},
                        {"bound_prediction", row.bound_prediction},
                        {"iterations", row.iterations},
                        {"residual", row.residual}});
    }
    json j = {{"eps", r.eps},
              {"chi_eps", r.chi_eps},
              {"rows", rows},
              {"fit_points", r.fit_points},
              {"slope_target", r.slope_target},
              {"support_fraction", r.support_fraction},
              {"ratio_spread", r.ratio_spread},
              {"c_hat", r.c_hat},
              {"omega_norm", r.omega_norm},
              {"trivial", r.trivial}};
    j["slope"] = r.slope ? json(*r.slope) : json(nullptr);
    j["intercept"] = r.intercept ? json(*r.intercept) : json(nullptr);
    return j;
}

json to_json(const AvoidanceReport& r) {
    return {{"max_u_on_U", r.max_u_on_U},
            {"max_v", r.max_v},
            {"max_v_on_U", r.max_v_on_U},
            {"relative_u_on_U", r.relative_u_on_U},
            {"residual", r.residual},
            {"v_residual", r.v_residual},
            {"closed_on_C", r.closed_on_C},
            {"h_residual", r.h_residual},
            {"h_iterations", r.h_iterations},
            {"v_norm", r.v_norm},
            {"h_norm", r.h_norm},
            {"u_norm", r.u_norm},
            {"assembly_defect", r.assembly_defect},
            {"chi_h_defect", r.chi_h_defect},
            {"chi_inner", r.chi_inner},
            {"chi_outer", r.chi_outer},
            {"trivial", r.trivial}};
}

json to_json(const ApproxReport& r) {
    json stages = json::array();
    for (const ApproxStage& s : r.stages) {
        stages.push_back({{"k", s.k},
                          {"r_k", s.r_k},
                          {"tail_omega", s.tail_omega},
                          {"shell_mass", s.shell_mass},
                          {"dbar_omega_k_norm", s.dbar_omega_k_norm},
                          {"u_k_norm", s.u_k_norm},
                          {"mu_gap", s.mu_gap},
                          {"omega_gap", s.omega_gap},
                          {"v_k_norm", s.v_k_norm},
                          {"v_k_residual", s.v_k_residual},
                          {"v_k_iterations", s.v_k_iterations},
                          {"cutoff_max_dbar", s.cutoff_max_dbar},
                          {"mu_moment_defect", s.mu_moment_defect}});
    }
    return {{"stages", stages},
            {"r0", r.r0},
            {"c_hat", r.c_hat},
            {"correction_solves", r.correction_solves},
            {"duality_residual", r.duality_residual},
            {"duality_samples", r.duality_samples}};
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    // Shortest %.{p}g that round-trips.
    for (int p = 1; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string decay_csv(const DecayReport& r) {
    std::string out = "k,tail,ratio,bound_prediction\n";
    for (const DecayRow& row : r.rows) {
        out += format_double(row.k) + "," + format_double(row.tail) + "," + format_double(row.ratio) + "," +
               format_double(row.bound_prediction) + "\n";
    }
    return out;
}

std::string approx_csv(const ApproxReport& r) {
    std::string out = "k,r_k,tail_omega,dbar_omega_k_norm,u_k_norm,mu_gap,v_k_norm\n";
    for (const ApproxStage& s : r.stages) {
        out += std::to_string(s.k) + "," + format_double(s.r_k) + "," + format_double(s.tail_omega) + "," +
               format_double(s.dbar_omega_k_norm) + "," + format_double(s.u_k_norm) + "," +
               format_double(s.mu_gap) + "," + format_double(s.v_k_norm) + "\n";
    }
    return out;
}

}  // namespace dbarlab
