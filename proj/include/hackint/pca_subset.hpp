#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hackint/types.hpp"

namespace hackint {

struct PcaSubsetQuery {
    MatrixXd x;
    int q = 1;                 // subset size
    int k = 1;                 // number of score columns compared
    double theta_prime = 0.0;  // tolerance above the minimum loss, 0-100 scale
    bool standardize = false;  // divide centered columns by their std dev
    bool keep_losses = false;  // retain the per-subset loss table
    std::int64_t subset_cap = 10000000;
};

struct PcaHackReport {
    double min_loss = 0.0;
    std::vector<int> optimal_subset;
    std::int64_t num_within = 0;
    int features_covered = 0;
    int max_hamming = 0;
    std::int64_t total_subsets = 0;
    std::vector<std::pair<std::vector<int>, double>> per_subset_losses;
};

// Principal component scores: centered (optionally standardized) X projected
// onto the leading k eigenvectors of X'X, columns ordered by descending
// eigenvalue and sign-canonicalized.
MatrixXd pca_scores(const MatrixXd& x, int k, bool standardize = false);

// Procrustes structural loss of a feature subset on the 0-100 scale:
// both k-column score matrices Frobenius-normalized, then
// 50 * trace(S'S + Sq'Sq - 2*Sigma) = 100 * (1 - sum of singular values).
double subset_loss(const MatrixXd& x, const std::vector<int>& subset, int k,
                   bool standardize = false);

// Exhaustive enumeration of all q-subsets: count within the tolerance,
// features covered by any such subset, and the maximum Hamming distance to
// the optimal subset.
PcaHackReport subset_hacking_report(const PcaSubsetQuery& query);

} // namespace hackint
