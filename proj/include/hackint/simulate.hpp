#pragma once

#include <cstdint>

#include "hackint/types.hpp"

namespace hackint {

// Two uniform covariates on [1,5], a fair treatment coin, outcomes
// 2*treated + v1 + v2 + N(0,1) noise, observed through the full set of
// monomials up to degree two in each variable.
Dataset simulate_treatment_dgp(int n, std::uint64_t seed);

// Monomial expansion (v1, v2, v1^2, v2^2, v1 v2, v1 v2^2, v1^2 v2, v1^2 v2^2).
VectorXd monomial_features(double v1, double v2);
inline constexpr int kMonomialCount = 8;
inline constexpr double kTreatmentGroundTruth = 2.0;

// Covariates uniform on [0,10]^2 with mean outcome constant along slope-one
// lines: y = (v2 - v1)/2 + N(0,1).
Dataset simulate_kernel_layout(int n, std::uint64_t seed);

// Two Gaussian blobs, labels -1/+1, for decision-value interval studies.
// Returns the dataset (labels in y) and writes the query point to x_new.
Dataset simulate_svm_layout(int n_per_class, std::uint64_t seed, VectorXd& x_new);

// Uniform covariates on [0,1]^2 with a smooth [0,1]-valued mean response,
// mirroring the nearest-neighbor illustration.
Dataset simulate_knn_layout(int n, std::uint64_t seed);

} // namespace hackint
