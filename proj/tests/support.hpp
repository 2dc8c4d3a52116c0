#pragma once

// Shared helpers for the unit tests: frozen oracle values and seeded samples.

#include <fstream>
#include <string>

#include <json.hpp>

#include "stable_forms/form.hpp"
#include "stable_forms/rng.hpp"

namespace testing_support {

/// Values produced by tests/oracles/oracle.py (independent numpy implementation).
inline const nlohmann::json& goldens() {
  static const nlohmann::json g = [] {
    std::ifstream in(GOLDENS_PATH);
    return nlohmann::json::parse(in);
  }();
  return g;
}

inline stable_forms::RealForm random_form(std::mt19937_64& gen, int n, int k) {
  return stable_forms::RealForm::from_vector(n, k, stable_forms::normal_vector(gen, stable_forms::binomial(n, k)));
}

inline Eigen::MatrixXd well_conditioned(std::mt19937_64& gen, int n) {
  for (;;) {
    const Eigen::MatrixXd A = stable_forms::normal_matrix(gen, n, n);
    const Eigen::VectorXd sv = A.jacobiSvd().singularValues();
    if (sv(sv.size() - 1) > 0.01 * sv(0)) return A;
  }
}

}  // namespace testing_support
