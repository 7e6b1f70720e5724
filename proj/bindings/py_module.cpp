#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hackint/inference.hpp"
#include "hackint/kernel_metric.hpp"
#include "hackint/oracle.hpp"
#include "hackint/pca_subset.hpp"
#include "hackint/prescriptive.hpp"
#include "hackint/regression.hpp"
#include "hackint/simulate.hpp"
#include "hackint/svm.hpp"

namespace py = pybind11;
using namespace hackint;

namespace {

Dataset make_dataset(const MatrixXd& x, const VectorXd& y,
                     const std::optional<VectorXd>& w) {
    Dataset d;
    d.x = x;
    d.y = y;
    d.w = w;
    d.validate();
    return d;
}

LossBudget budget_from_kwargs(const std::optional<double>& theta,
                              const std::optional<double>& theta_rel,
                              const std::optional<double>& alpha, bool sign_flip) {
    const int count = theta.has_value() + theta_rel.has_value() + alpha.has_value() + sign_flip;
    if (count != 1)
        throw Error(errc::invalid_config,
                    "exactly one of theta, theta_rel, alpha, sign_flip is required");
    if (theta) return LossBudget::absolute(*theta);
    if (theta_rel) return LossBudget::relative_to_min(*theta_rel);
    if (alpha) return LossBudget::classical_alpha(*alpha);
    return LossBudget::sign_flip();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "hacking-interval core operations";

    py::register_exception<Error>(m, "HackintError");

    py::class_<HackingInterval>(m, "HackingInterval")
        .def_readonly("lower", &HackingInterval::lower)
        .def_readonly("upper", &HackingInterval::upper)
        .def_readonly("stat_at_min_loss", &HackingInterval::stat_at_min_loss)
        .def_readonly("theta", &HackingInterval::theta)
        .def_readonly("witness_lower", &HackingInterval::witness_lower)
        .def_readonly("witness_upper", &HackingInterval::witness_upper)
        .def_readonly("witness_layout", &HackingInterval::witness_layout)
        .def("width", &HackingInterval::width)
        .def("contains", &HackingInterval::contains)
        .def("__repr__", [](const HackingInterval& iv) {
            return "HackingInterval([" + std::to_string(iv.lower) + ", " +
                   std::to_string(iv.upper) + "])";
        });

    py::class_<OlsFit>(m, "OlsFit")
        .def_readonly("beta_ls", &OlsFit::beta_ls)
        .def_readonly("beta0_ls", &OlsFit::beta0_ls)
        .def_readonly("sse", &OlsFit::sse)
        .def_readonly("gram_inv", &OlsFit::gram_inv)
        .def_readonly("v_tt", &OlsFit::v_tt)
        .def_readonly("gamma_ls", &OlsFit::gamma_ls)
        .def_readonly("n", &OlsFit::n)
        .def_readonly("p", &OlsFit::p);

    m.def(
        "fit_ols",
        [](const MatrixXd& x, const VectorXd& y, const std::optional<VectorXd>& w) {
            return fit_ols(make_dataset(x, y, w), w.has_value());
        },
        py::arg("x"), py::arg("y"), py::arg("w") = std::nullopt);

    m.def("ate_interval", &ate_interval, py::arg("fit"), py::arg("theta"));
    m.def("prediction_interval", &prediction_interval, py::arg("fit"), py::arg("x_new"),
          py::arg("theta"));
    m.def(
        "ite_interval",
        [](const MatrixXd& xt, const VectorXd& yt, const MatrixXd& xc, const VectorXd& yc,
           const VectorXd& x_new, double theta_t, double theta_c) {
            return ite_interval(make_dataset(xt, yt, {}), make_dataset(xc, yc, {}), x_new,
                                theta_t, theta_c);
        },
        py::arg("x_treated"), py::arg("y_treated"), py::arg("x_control"), py::arg("y_control"),
        py::arg("x_new"), py::arg("theta_treated"), py::arg("theta_control"));

    m.def(
        "resolve_theta",
        [](double min_loss, const std::optional<double>& theta,
           const std::optional<double>& theta_rel, const std::optional<double>& alpha,
           bool sign_flip, const OlsFit* fit) {
            return resolve_theta(budget_from_kwargs(theta, theta_rel, alpha, sign_flip),
                                 min_loss, fit);
        },
        py::arg("min_loss"), py::arg("theta") = std::nullopt, py::arg("theta_rel") = std::nullopt,
        py::arg("alpha") = std::nullopt, py::arg("sign_flip") = false, py::arg("fit") = nullptr);

    py::class_<CiEquivalenceReport>(m, "CiEquivalenceReport")
        .def_readonly("hacking", &CiEquivalenceReport::hacking)
        .def_readonly("classical_lower", &CiEquivalenceReport::classical_lower)
        .def_readonly("classical_upper", &CiEquivalenceReport::classical_upper)
        .def_readonly("theta", &CiEquivalenceReport::theta)
        .def_readonly("max_abs_gap", &CiEquivalenceReport::max_abs_gap);

    m.def(
        "classical_ci_equivalence_check",
        [](const OlsFit& fit, double alpha, const std::string& kind,
           const std::optional<VectorXd>& x_new) {
            return classical_ci_equivalence_check(
                fit, alpha, kind == "ate" ? CiKind::ate : CiKind::prediction, x_new);
        },
        py::arg("fit"), py::arg("alpha"), py::arg("kind") = "ate",
        py::arg("x_new") = std::nullopt);

    m.def("ate_bound_variance", &ate_bound_variance, py::arg("sigma2"), py::arg("v_tt"),
          py::arg("r"), py::arg("n"), py::arg("p"));

    m.def(
        "profile_theta",
        [](double log_lp_max, int m_df, double alpha) {
            return profile_theta({log_lp_max, m_df, alpha});
        },
        py::arg("log_lp_max"), py::arg("m"), py::arg("alpha"));
    m.def("loss_threshold_from_profile", &loss_threshold_from_profile, py::arg("theta_p"));

    m.def(
        "generalization_bound",
        [](int h, int n, double delta, double theta1, double theta2, double theta3,
           double theta4, const std::string& form) {
            return generalization_bound(
                {h, n, delta, theta1, theta2, theta3, theta4},
                form == "n-over-h" ? VcLogForm::n_over_h : VcLogForm::h_over_n);
        },
        py::arg("h"), py::arg("n"), py::arg("delta"), py::arg("theta1") = 0.0,
        py::arg("theta2") = 0.0, py::arg("theta3") = 0.0, py::arg("theta4") = 0.0,
        py::arg("vc_log_form") = "h-over-n");

    py::class_<SvmModel>(m, "SvmModel")
        .def_readonly("lambda_", &SvmModel::lambda)
        .def_readonly("lambda0", &SvmModel::lambda0)
        .def("decision", &SvmModel::decision);

    py::class_<SvmIntervalResult>(m, "SvmIntervalResult")
        .def_readonly("interval", &SvmIntervalResult::interval)
        .def_readonly("min_loss", &SvmIntervalResult::min_loss)
        .def_readonly("baseline", &SvmIntervalResult::baseline)
        .def_readonly("degraded", &SvmIntervalResult::degraded);

    m.def(
        "svm_min_loss",
        [](const MatrixXd& x, const VectorXd& y, double psi_d, std::uint64_t seed) {
            return svm_min_loss(x, y, psi_d, seed);
        },
        py::arg("x"), py::arg("y"), py::arg("psi_d"), py::arg("seed") = 0);

    m.def(
        "svm_hacking_interval",
        [](const MatrixXd& x, const VectorXd& y, double psi_d, const VectorXd& x_new,
           double theta, std::uint64_t seed) {
            return svm_hacking_interval({x, y, psi_d, x_new, theta, seed});
        },
        py::arg("x"), py::arg("y"), py::arg("psi_d"), py::arg("x_new"), py::arg("theta"),
        py::arg("seed") = 0);

    m.def(
        "svm_interval_batch",
        [](const MatrixXd& x, const VectorXd& y, double psi_d, double rel_tolerance,
           const MatrixXd& queries, std::uint64_t seed, int threads) {
            const auto batch = svm_interval_batch(x, y, psi_d, rel_tolerance, queries, seed, threads);
            py::list rows;
            for (size_t i = 0; i < batch.intervals.size(); ++i) {
                py::dict row;
                row["interval"] = batch.intervals[i].interval;
                row["classification"] = classification_name(batch.classes[i]);
                row["degraded"] = batch.intervals[i].degraded;
                rows.append(row);
            }
            py::dict out;
            out["min_loss"] = batch.min_loss;
            out["theta"] = batch.theta;
            out["results"] = rows;
            return out;
        },
        py::arg("x"), py::arg("y"), py::arg("psi_d"), py::arg("rel_tolerance"),
        py::arg("queries"), py::arg("seed") = 0, py::arg("threads") = 0);

    m.def(
        "knn_interval",
        [](const MatrixXd& x, const VectorXd& y, const VectorXd& x_new, int k_min, int k_max) {
            const auto res = knn_interval({x, y, x_new, k_min, k_max});
            return py::make_tuple(res.interval, res.trace);
        },
        py::arg("x"), py::arg("y"), py::arg("x_new"), py::arg("k_min"), py::arg("k_max"));

    m.def("knn_select_kstar", &knn_select_kstar, py::arg("x"), py::arg("y"), py::arg("k_min"),
          py::arg("k_max"));

    m.def("adjustment_factor", &adjustment_factor, py::arg("or_yu"), py::arg("p0"),
          py::arg("p1"));

    py::class_<FeatureIntervalResult>(m, "FeatureIntervalResult")
        .def_readonly("interval", &FeatureIntervalResult::interval)
        .def_readonly("af_min", &FeatureIntervalResult::af_min)
        .def_readonly("af_max", &FeatureIntervalResult::af_max)
        .def_readonly("p1_floored", &FeatureIntervalResult::p1_floored)
        .def_readonly("via_grid", &FeatureIntervalResult::via_grid);

    m.def(
        "new_feature_interval",
        [](double or_yw_x, double or_yu, double c, double d) {
            return new_feature_interval({or_yw_x, or_yu, c, d});
        },
        py::arg("or_yw_x"), py::arg("or_yu"), py::arg("c"), py::arg("d") = 0.0);

    m.def(
        "kernel_predict",
        [](const MatrixXd& a, double psi_d, const MatrixXd& x, const VectorXd& y,
           const VectorXd& query, Eigen::Index exclude_index) {
            return kernel_predict(a, psi_d, x, y, query, exclude_index);
        },
        py::arg("a"), py::arg("psi_d"), py::arg("x"), py::arg("y"), py::arg("query"),
        py::arg("exclude_index") = -1);
    m.def("kernel_loss", &kernel_loss, py::arg("a"), py::arg("psi_d"), py::arg("x"),
          py::arg("y"));

    py::class_<KernelIntervalResult>(m, "KernelIntervalResult")
        .def_readonly("interval", &KernelIntervalResult::interval)
        .def_readonly("witness_lower_a", &KernelIntervalResult::witness_lower_a)
        .def_readonly("witness_upper_a", &KernelIntervalResult::witness_upper_a)
        .def_readonly("min_loss_found", &KernelIntervalResult::min_loss_found);

    m.def(
        "kernel_hacking_interval",
        [](const MatrixXd& x, const VectorXd& y, const VectorXd& x_new, double psi_d,
           double theta, const std::optional<MatrixXd>& a_init, int restarts, int max_iters,
           std::uint64_t seed) {
            MetricKernelSpec spec;
            spec.x = x;
            spec.y = y;
            spec.x_new = x_new;
            spec.psi_d = psi_d;
            spec.theta = theta;
            if (a_init) spec.a_init = *a_init;
            spec.opts.restarts = restarts;
            spec.opts.max_iters = max_iters;
            spec.opts.seed = seed;
            return kernel_hacking_interval(spec);
        },
        py::arg("x"), py::arg("y"), py::arg("x_new"), py::arg("psi_d"), py::arg("theta"),
        py::arg("a_init") = std::nullopt, py::arg("restarts") = 8, py::arg("max_iters") = 200,
        py::arg("seed") = 0);

    m.def("pca_scores", &pca_scores, py::arg("x"), py::arg("k"), py::arg("standardize") = false);
    m.def("subset_loss", &subset_loss, py::arg("x"), py::arg("subset"), py::arg("k"),
          py::arg("standardize") = false);

    py::class_<PcaHackReport>(m, "PcaHackReport")
        .def_readonly("min_loss", &PcaHackReport::min_loss)
        .def_readonly("optimal_subset", &PcaHackReport::optimal_subset)
        .def_readonly("num_within", &PcaHackReport::num_within)
        .def_readonly("features_covered", &PcaHackReport::features_covered)
        .def_readonly("max_hamming", &PcaHackReport::max_hamming)
        .def_readonly("total_subsets", &PcaHackReport::total_subsets)
        .def_readonly("per_subset_losses", &PcaHackReport::per_subset_losses);

    m.def(
        "subset_hacking_report",
        [](const MatrixXd& x, int q, int k, double theta_prime, bool standardize,
           bool keep_losses) {
            PcaSubsetQuery query;
            query.x = x;
            query.q = q;
            query.k = k;
            query.theta_prime = theta_prime;
            query.standardize = standardize;
            query.keep_losses = keep_losses;
            return subset_hacking_report(query);
        },
        py::arg("x"), py::arg("q"), py::arg("k"), py::arg("theta_prime"),
        py::arg("standardize") = false, py::arg("keep_losses") = false);

    m.def(
        "brute_force_interval",
        [](const std::function<double(const VectorXd&)>& loss,
           const std::function<double(const VectorXd&)>& stat, double theta,
           const std::vector<std::pair<double, double>>& box, std::int64_t samples,
           std::uint64_t seed) {
            oracle::OracleBudget budget;
            budget.samples = samples;
            budget.box = box;
            budget.seed = seed;
            const auto res = oracle::brute_force_interval(loss, stat, theta, budget);
            py::dict out;
            out["lower"] = res.lower;
            out["upper"] = res.upper;
            out["witness_lower"] = res.witness_lower;
            out["witness_upper"] = res.witness_upper;
            out["feasible_count"] = res.feasible_count;
            return out;
        },
        py::arg("loss"), py::arg("stat"), py::arg("theta"), py::arg("box"),
        py::arg("samples") = 100000, py::arg("seed") = 0);

    m.def("simulate_treatment_dgp", [](int n, std::uint64_t seed) {
        const auto d = simulate_treatment_dgp(n, seed);
        return py::make_tuple(d.x, d.y, *d.w);
    }, py::arg("n"), py::arg("seed"));
    m.def("monomial_features", &monomial_features, py::arg("v1"), py::arg("v2"));

    m.attr("__version__") = "0.1.0";
}
