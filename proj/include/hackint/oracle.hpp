#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hackint/types.hpp"

namespace hackint::oracle {

struct OracleBudget {
    std::int64_t samples = 100000;
    int refine_steps = 60;                      // golden-section evaluations per coordinate
    std::vector<std::pair<double, double>> box; // per-parameter bounds
    std::uint64_t seed = 0;
};

struct OracleResult {
    double lower = 0.0;
    double upper = 0.0;
    VectorXd witness_lower;
    VectorXd witness_upper;
    std::int64_t feasible_count = 0;
};

using ScalarFn = std::function<double(const VectorXd&)>;

// Direct search over the feasible set {params : loss(params) <= theta}:
// a low-discrepancy sweep of the box, Gaussian perturbation rounds around
// the best-loss point, then per-coordinate golden-section polish of the
// statistic with feasibility rejection. The result is an inner
// approximation by construction; throws NoFeasibleSample when nothing in
// the budget satisfies the constraint.
OracleResult brute_force_interval(const ScalarFn& loss, const ScalarFn& stat,
                                  double theta, const OracleBudget& budget);

} // namespace hackint::oracle
