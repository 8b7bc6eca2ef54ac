#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dbarlab/procedures.hpp"

namespace dbarlab {

inline constexpr int kSchemaVersion = 1;

/// A checked invariant: passed iff value <= limit (or value >= limit when
/// `at_least`).
struct Assertion {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool at_least = false;
    bool passed = false;
};

Assertion check_at_most(std::string name, double value, double limit);
Assertion check_at_least(std::string name, double value, double limit);
Assertion check_true(std::string name, bool ok);

nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const AvoidanceReport& r);
nlohmann::json to_json(const ApproxReport& r);
nlohmann::json to_json(const Assertion& a);

/// Columns k, tail, ratio, bound_prediction.
std::string decay_csv(const DecayReport& r);
/// Columns k, r_k, tail_omega, dbar_omega_k_norm, u_k_norm, mu_gap, v_k_norm.
std::string approx_csv(const ApproxReport& r);

/// Shortest round-trip formatting used in every CSV cell.
std::string format_double(double v);

}  // namespace dbarlab
