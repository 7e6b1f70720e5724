#include "hackint/pca_subset.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace hackint {

namespace {

MatrixXd centered(const MatrixXd& x, bool standardize) {
    MatrixXd xc = x.rowwise() - x.colwise().mean();
    if (standardize) {
        for (Eigen::Index c = 0; c < xc.cols(); ++c) {
            const double sd = std::sqrt(xc.col(c).squaredNorm() / std::max<Eigen::Index>(1, xc.rows() - 1));
            if (sd > 1e-300) xc.col(c) /= sd;
        }
    }
    return xc;
}

std::int64_t binomial(int p, int q) {
    double v = 1.0;
    for (int i = 0; i < q; ++i) v = v * (p - i) / (i + 1);
    return static_cast<std::int64_t>(std::llround(v));
}

} // namespace

MatrixXd pca_scores(const MatrixXd& x, int k, bool standardize) {
    if (k < 1 || k > x.cols())
        throw Error(errc::dimension_mismatch, "need 1 <= k <= p");
    const MatrixXd xc = centered(x, standardize);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(xc.transpose() * xc);
    const VectorXd evals = eig.eigenvalues(); // ascending
    const Eigen::Index p = x.cols();
    const double largest = std::max(evals(p - 1), 0.0);
    if (evals(p - k) < 1e-10 * largest || largest <= 0.0)
        throw Error(errc::rank_deficient,
                    "k = " + std::to_string(k) + " exceeds the numerical rank");

    MatrixXd w(p, k);
    for (int j = 0; j < k; ++j) {
        VectorXd v = eig.eigenvectors().col(p - 1 - j);
        // Sign canon: largest-magnitude loading positive.
        Eigen::Index imax;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        w.col(j) = v;
    }
    return xc * w;
}

double subset_loss(const MatrixXd& x, const std::vector<int>& subset, int k, bool standardize) {
    const int q = static_cast<int>(subset.size());
    if (q < k) throw Error(errc::dimension_mismatch, "subset size must be >= k");
    for (int idx : subset)
        if (idx < 0 || idx >= x.cols())
            throw Error(errc::dimension_mismatch, "subset index out of range");

    MatrixXd xq(x.rows(), q);
    for (int j = 0; j < q; ++j) xq.col(j) = x.col(subset[j]);

    MatrixXd s = pca_scores(x, k, standardize);
    MatrixXd sq = pca_scores(xq, k, standardize);
    const double ns = s.norm(), nsq = sq.norm();
    if (ns <= 1e-300 || nsq <= 1e-300)
        throw Error(errc::rank_deficient, "score matrix has zero norm");
    s /= ns;
    sq /= nsq;

    const MatrixXd cross = s.transpose() * sq; // k x k
    Eigen::JacobiSVD<MatrixXd> svd(cross);
    const double trace_sigma = svd.singularValues().sum();
    const double loss = 100.0 * (1.0 - trace_sigma);
    return std::clamp(loss, 0.0, 100.0);
}

PcaHackReport subset_hacking_report(const PcaSubsetQuery& query) {
    const int p = static_cast<int>(query.x.cols());
    const int q = query.q, k = query.k;
    if (!(1 <= k && k <= q && q < p))
        throw Error(errc::dimension_mismatch, "need 1 <= k <= q < p");
    if (query.x.rows() <= k)
        throw Error(errc::dimension_mismatch, "need n > k");
    if (query.theta_prime < 0.0)
        throw Error(errc::invalid_config, "theta_prime must be nonnegative");

    const std::int64_t total = binomial(p, q);
    if (total > query.subset_cap)
        throw Error(errc::subset_space_too_large,
                    "C(p,q) = " + std::to_string(total) + " exceeds the enumeration cap");

    PcaHackReport rep;
    rep.total_subsets = total;

    std::vector<int> subset(q);
    for (int i = 0; i < q; ++i) subset[i] = i;
    std::vector<std::pair<std::vector<int>, double>> losses;
    losses.reserve(total);
    for (;;) {
        losses.emplace_back(subset, subset_loss(query.x, subset, k, query.standardize));
        // next combination in lexicographic order
        int i = q - 1;
        while (i >= 0 && subset[i] == p - q + i) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < q; ++j) subset[j] = subset[j - 1] + 1;
    }

    rep.min_loss = losses.front().second;
    rep.optimal_subset = losses.front().first;
    for (const auto& [sub, loss] : losses) {
        if (loss < rep.min_loss) {
            rep.min_loss = loss;
            rep.optimal_subset = sub; // first (lexicographically smallest) minimizer wins
        }
    }

    const double cutoff = rep.min_loss + query.theta_prime;
    std::vector<char> covered(p, 0);
    std::vector<char> in_optimal(p, 0);
    for (int idx : rep.optimal_subset) in_optimal[idx] = 1;
    for (const auto& [sub, loss] : losses) {
        if (loss > cutoff) continue;
        ++rep.num_within;
        int overlap = 0;
        for (int idx : sub) {
            covered[idx] = 1;
            overlap += in_optimal[idx];
        }
        rep.max_hamming = std::max(rep.max_hamming, 2 * (q - overlap));
    }
    rep.features_covered = static_cast<int>(std::count(covered.begin(), covered.end(), 1));
    if (query.keep_losses) rep.per_subset_losses = std::move(losses);
    return rep;
}

} // namespace hackint
