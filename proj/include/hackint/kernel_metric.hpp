#pragma once

#include <cstdint>

#include "hackint/types.hpp"

namespace hackint {

struct KernelOpts {
    int restarts = 8;
    int max_iters = 200;          // gradient steps per penalty stage
    double penalty_growth = 10.0; // exterior penalty multiplier per stage
    int penalty_stages = 6;
    double tol = 1e-7;
    std::uint64_t seed = 0;
};

struct MetricKernelSpec {
    MatrixXd x;
    VectorXd y;
    VectorXd x_new;
    double psi_d = 1.0;
    double theta = 0.0;
    MatrixXd a_init; // empty = identity
    KernelOpts opts;
};

// Nadaraya-Watson prediction with Gaussian kernel exp(-d_A/psi^2) of the
// Mahalanobis form d_A(u,v) = (u-v)' A'A (u-v). exclude_index drops one
// training row (the j != i sums of the training loss).
double kernel_predict(const MatrixXd& a, double psi_d, const MatrixXd& x, const VectorXd& y,
                      const VectorXd& query, Eigen::Index exclude_index = -1);

// Leave-one-out quadratic training loss of the metric A.
double kernel_loss(const MatrixXd& a, double psi_d, const MatrixXd& x, const VectorXd& y);

struct KernelIntervalResult {
    HackingInterval interval; // witnesses are A matrices, row-major p*p
    MatrixXd witness_lower_a, witness_upper_a;
    double loss_lower = 0.0, loss_upper = 0.0;
    double min_loss_found = 0.0;
    MatrixXd min_loss_a;
};

// Certified-achievable (inner) interval of f_A(x_new) over metrics with
// training loss <= theta. Multi-start penalized local search; results are
// labeled inner approximations, not global optima.
KernelIntervalResult kernel_hacking_interval(const MetricKernelSpec& spec);

} // namespace hackint
