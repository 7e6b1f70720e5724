#include "hackint/simulate.hpp"

#include <cmath>
#include <random>

namespace hackint {

VectorXd monomial_features(double v1, double v2) {
    VectorXd x(kMonomialCount);
    x << v1, v2, v1 * v1, v2 * v2, v1 * v2, v1 * v2 * v2, v1 * v1 * v2, v1 * v1 * v2 * v2;
    return x;
}

Dataset simulate_treatment_dgp(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(1.0, 5.0);
    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> noise(0.0, 1.0);

    Dataset d;
    d.x.resize(n, kMonomialCount);
    d.y.resize(n);
    VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        const double v1 = unif(rng);
        const double v2 = unif(rng);
        const double treated = coin(rng) ? 1.0 : 0.0;
        d.x.row(i) = monomial_features(v1, v2).transpose();
        w(i) = treated;
        d.y(i) = kTreatmentGroundTruth * treated + v1 + v2 + noise(rng);
    }
    d.w = w;
    d.names = {"v1", "v2", "v1sq", "v2sq", "v1v2", "v1v2sq", "v1sqv2", "v1sqv2sq"};
    return d;
}

Dataset simulate_kernel_layout(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 10.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    Dataset d;
    d.x.resize(n, 2);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v1 = unif(rng);
        const double v2 = unif(rng);
        d.x(i, 0) = v1;
        d.x(i, 1) = v2;
        d.y(i) = 0.5 * (v2 - v1) + noise(rng);
    }
    d.names = {"v1", "v2"};
    return d;
}

Dataset simulate_svm_layout(int n_per_class, std::uint64_t seed, VectorXd& x_new) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    Dataset d;
    const int n = 2 * n_per_class;
    d.x.resize(n, 2);
    d.y.resize(n);
    for (int i = 0; i < n_per_class; ++i) {
        d.x(i, 0) = -1.0 + noise(rng);
        d.x(i, 1) = noise(rng);
        d.y(i) = -1.0;
        d.x(n_per_class + i, 0) = 1.0 + noise(rng);
        d.x(n_per_class + i, 1) = noise(rng);
        d.y(n_per_class + i) = 1.0;
    }
    d.names = {"f1", "f2"};
    x_new = (VectorXd(2) << 1.3, 0.2).finished();
    return d;
}

Dataset simulate_knn_layout(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.15);

    Dataset d;
    d.x.resize(n, 2);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const double u = unif(rng), v = unif(rng);
        d.x(i, 0) = u;
        d.x(i, 1) = v;
        const double mean = 0.5 + 0.3 * std::sin(3.0 * u) + 0.2 * (v - 0.5);
        d.y(i) = std::clamp(mean + noise(rng), 0.0, 1.0);
    }
    d.names = {"f1", "f2"};
    return d;
}

} // namespace hackint
