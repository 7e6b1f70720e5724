#pragma once

#include <cstdint>
#include <vector>

#include "hackint/types.hpp"

namespace hackint {

// Linear SVM hyperplane.
struct SvmModel {
    VectorXd lambda;
    double lambda0 = 0.0;

    double decision(const VectorXd& x) const { return lambda.dot(x) + lambda0; }
};

struct SvmProblem {
    MatrixXd x;
    VectorXd y;       // labels strictly in {-1,+1}
    double psi_d = 1.0;
    VectorXd x_new;
    double theta = 0.0;
    std::uint64_t seed = 0;
};

// Converged dual variables for one direction s, together with the
// recovered hyperplane and the dual objective value.
struct SvmDualSolution {
    VectorXd alpha;
    double beta = 0.0;
    int s = +1;
    VectorXd lambda;
    double lambda0 = 0.0;
    double objective = 0.0;
    double primal_loss = 0.0;
    bool interior_sv_found = true;
};

struct SvmIntervalResult {
    HackingInterval interval;
    SvmDualSolution lower_solution; // s = +1 (minimization)
    SvmDualSolution upper_solution; // s = -1 (maximization)
    double min_loss = 0.0;
    SvmModel baseline;
    bool degraded = false; // solver missed the duality-gap tolerance
    double gap_lower = 0.0, gap_upper = 0.0;
};

enum class SvmClassification { all_negative, straddles, all_positive };

struct SvmBatchResult {
    double min_loss = 0.0;
    double theta = 0.0;
    SvmModel baseline;
    std::vector<SvmIntervalResult> intervals;
    std::vector<SvmClassification> classes;
};

double svm_primal_loss(const MatrixXd& x, const VectorXd& y, double psi_d,
                       const SvmModel& m);

// Baseline non-separable SVM training; returns the hinge-loss-regularized
// minimizer and its loss.
std::pair<SvmModel, double> svm_min_loss(const MatrixXd& x, const VectorXd& y,
                                         double psi_d, std::uint64_t seed = 0);

// Tethered interval for the decision value at x_new, via the dual program
// solved once per direction. Witness vectors are [lambda..., lambda0].
SvmIntervalResult svm_hacking_interval(const SvmProblem& problem);

SvmBatchResult svm_interval_batch(const MatrixXd& x, const VectorXd& y, double psi_d,
                                  double rel_tolerance, const MatrixXd& queries,
                                  std::uint64_t seed = 0, int threads = 0);

const char* classification_name(SvmClassification c);

} // namespace hackint
