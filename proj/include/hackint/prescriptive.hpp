#pragma once

#include <vector>

#include "hackint/types.hpp"

namespace hackint {

struct KnnSpec {
    MatrixXd x;
    VectorXd y;
    VectorXd x_new;
    int k_min = 1;
    int k_max = 1;
};

struct KnnIntervalResult {
    HackingInterval interval; // witnesses hold the attaining k as a 1-vector
    std::vector<std::pair<int, double>> trace; // (k, prediction) over the range
};

// min/max over k in [k_min, k_max] of the k-nearest-neighbor mean of y at
// x_new. Euclidean distance, ties broken by ascending row index.
KnnIntervalResult knn_interval(const KnnSpec& spec);

// k minimizing leave-one-out squared prediction error, ties to smallest k.
int knn_select_kstar(const MatrixXd& x, const VectorXd& y, int k_min, int k_max);

// Odds-ratio adjustment factor ((OR_yu-1)p1 + 1)/((OR_yu-1)p0 + 1).
double adjustment_factor(double or_yu, double p0, double p1);

struct FeatureHackConstraints {
    double or_yw_x = 1.0; // observed adjusted odds ratio
    double or_yu = 1.5;   // fixed outcome association of the new feature
    double c = 0.0;       // bound on |p1 - p0|
    double d = 0.0;       // lower bound on p0

    void validate() const;
};

struct FeatureIntervalResult {
    HackingInterval interval; // witnesses hold (p0, p1)
    double af_min = 1.0, af_max = 1.0;
    bool p1_floored = false;  // AF_min used p1 = max(p0 - c, 0)
    bool via_grid = false;    // or_yu <= 1 routed to the grid search
};

// Interval of the adjusted odds ratio OR_{yw|xu} = or_yw_x / AF over the
// constraint set; closed form at p0 = d when or_yu > 1, grid search
// otherwise.
FeatureIntervalResult new_feature_interval(const FeatureHackConstraints& cons);

struct FeatureSweepCell {
    double c = 0.0;
    double or_yu = 0.0;
    FeatureIntervalResult result;
};

std::vector<FeatureSweepCell> new_feature_sweep(const FeatureHackConstraints& base,
                                                const std::vector<double>& c_values,
                                                const std::vector<double>& or_yu_values);

} // namespace hackint
