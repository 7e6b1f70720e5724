#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hackint/csv.hpp"
#include "hackint/inference.hpp"
#include "hackint/kernel_metric.hpp"
#include "hackint/pca_subset.hpp"
#include "hackint/prescriptive.hpp"
#include "hackint/regression.hpp"
#include "hackint/report.hpp"
#include "hackint/simulate.hpp"
#include "hackint/svm.hpp"

namespace {

using hackint::json;

struct CommonOpts {
    std::string input;
    std::string outcome;
    std::string treatment;
    std::string features;  // comma-separated
    std::string xnew;      // comma-separated
    double theta = -1.0;
    double theta_rel = -1.0;
    double alpha = -1.0;
    bool sign_flip = false;
    double psi_d = 1.0;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format = "json";
    bool deterministic = false;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
}

hackint::VectorXd parse_vector(const std::string& s) {
    const auto parts = split_list(s);
    hackint::VectorXd v(parts.size());
    for (size_t i = 0; i < parts.size(); ++i) {
        try {
            v(i) = std::stod(parts[i]);
        } catch (...) {
            throw hackint::Error(hackint::errc::invalid_config,
                                 "cannot parse '" + parts[i] + "' as a number");
        }
    }
    return v;
}

hackint::LossBudget budget_from(const CommonOpts& o) {
    int set_count = (o.theta >= 0.0) + (o.theta_rel >= 0.0) + (o.alpha >= 0.0) + o.sign_flip;
    if (set_count != 1)
        throw hackint::Error(hackint::errc::invalid_config,
                             "exactly one of --theta, --theta-rel, --alpha, --sign-flip is required");
    if (o.theta >= 0.0) return hackint::LossBudget::absolute(o.theta);
    if (o.theta_rel >= 0.0) return hackint::LossBudget::relative_to_min(o.theta_rel);
    if (o.alpha >= 0.0) return hackint::LossBudget::classical_alpha(o.alpha);
    return hackint::LossBudget::sign_flip();
}

std::string budget_echo(const CommonOpts& o) {
    if (o.theta >= 0.0) return "theta=" + std::to_string(o.theta);
    if (o.theta_rel >= 0.0) return "theta-rel=" + std::to_string(o.theta_rel);
    if (o.alpha >= 0.0) return "alpha=" + std::to_string(o.alpha);
    if (o.sign_flip) return "sign-flip";
    return "none";
}

hackint::IngestResult load_dataset(const CommonOpts& o, bool need_treatment) {
    if (o.input.empty())
        throw hackint::Error(hackint::errc::invalid_config, "--input is required");
    hackint::CsvBindings b;
    b.outcome = o.outcome;
    b.features = split_list(o.features);
    if (!o.treatment.empty()) b.treatment = o.treatment;
    if (need_treatment && !b.treatment)
        throw hackint::Error(hackint::errc::missing_treatment, "--treatment is required");
    return hackint::ingest_csv(o.input, b);
}

void emit(const CommonOpts& o, const json& report, const std::string& csv_text) {
    std::string text;
    if (o.format == "csv") {
        text = csv_text;
    } else {
        text = report.dump(2);
        text += "\n";
    }
    if (!o.out_path.empty()) {
        std::ofstream f(o.out_path, std::ios::binary);
        f << text;
    } else {
        std::cout << text;
    }
}

std::string csv_interval_row(const std::string& label, const hackint::HackingInterval& iv) {
    std::ostringstream os;
    os.precision(17);
    os << "label,lower,upper,stat_at_min_loss,theta\n";
    os << label << "," << iv.lower << "," << iv.upper << "," << iv.stat_at_min_loss << ","
       << iv.theta << "\n";
    return os.str();
}

// Thin logistic-regression helper (intercept + features + treatment) used
// only to estimate the observed adjusted odds ratio for `feature`.
double estimate_or_yw_x(const hackint::Dataset& data) {
    using hackint::MatrixXd;
    using hackint::VectorXd;
    if (!data.w)
        throw hackint::Error(hackint::errc::missing_treatment,
                             "odds-ratio estimation needs a treatment column");
    const Eigen::Index n = data.n(), p = data.p();
    MatrixXd design(n, p + 2);
    design.col(0).setOnes();
    design.middleCols(1, p) = data.x;
    design.col(p + 1) = *data.w;
    VectorXd y01(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = data.y(i);
        if (v == 1.0) y01(i) = 1.0;
        else if (v == 0.0 || v == -1.0) y01(i) = 0.0;
        else
            throw hackint::Error(hackint::errc::non_numeric_cell,
                                 "outcome must be binary for odds-ratio estimation");
    }
    VectorXd beta = VectorXd::Zero(p + 2);
    for (int it = 0; it < 100; ++it) {
        const VectorXd eta = design * beta;
        VectorXd mu(n), wdiag(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            mu(i) = 1.0 / (1.0 + std::exp(-eta(i)));
            wdiag(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-10);
        }
        const MatrixXd xtw = design.transpose() * wdiag.asDiagonal();
        const VectorXd step = (xtw * design).ldlt().solve(design.transpose() * (y01 - mu));
        beta += step;
        if (step.norm() < 1e-10) break;
    }
    return std::exp(beta(p + 1));
}

int run_ate(const CommonOpts& o) {
    const auto ingest = load_dataset(o, true);
    const auto fit = hackint::fit_ols(ingest.data, true);
    const double theta = hackint::resolve_theta(budget_from(o), fit.sse, &fit);
    const auto iv = hackint::ate_interval(fit, theta);

    json rep = hackint::report_skeleton("ate", o.seed, "ate|" + budget_echo(o), o.deterministic);
    rep["dropped_rows"] = ingest.dropped_rows;
    rep["theta"] = theta;
    rep["min_loss"] = fit.sse;
    rep["interval"] = hackint::interval_to_json(iv);
    emit(o, rep, csv_interval_row("ate", iv));
    return 0;
}

int run_predict(const CommonOpts& o) {
    auto opts = o;
    opts.treatment.clear(); // prediction fits the plain regression
    const auto ingest = load_dataset(opts, false);
    const auto fit = hackint::fit_ols(ingest.data, false);
    const auto x_new = parse_vector(o.xnew);
    const double theta = hackint::resolve_theta(budget_from(o), fit.sse, &fit);
    const auto iv = hackint::prediction_interval(fit, x_new, theta);

    json rep = hackint::report_skeleton("predict", o.seed, "predict|" + budget_echo(o), o.deterministic);
    rep["dropped_rows"] = ingest.dropped_rows;
    rep["theta"] = theta;
    rep["min_loss"] = fit.sse;
    rep["interval"] = hackint::interval_to_json(iv);
    emit(o, rep, csv_interval_row("predict", iv));
    return 0;
}

int run_ite(const CommonOpts& o) {
    const auto ingest = load_dataset(o, true);
    const auto& d = ingest.data;
    const auto x_new = parse_vector(o.xnew);

    std::vector<Eigen::Index> ti, ci;
    for (Eigen::Index i = 0; i < d.n(); ++i) ((*d.w)(i) == 1.0 ? ti : ci).push_back(i);
    auto arm = [&](const std::vector<Eigen::Index>& rows) {
        hackint::Dataset a;
        a.x.resize(rows.size(), d.p());
        a.y.resize(rows.size());
        for (size_t r = 0; r < rows.size(); ++r) {
            a.x.row(r) = d.x.row(rows[r]);
            a.y(r) = d.y(rows[r]);
        }
        a.names = d.names;
        return a;
    };
    const auto treated = arm(ti), control = arm(ci);
    const auto fit_t = hackint::fit_ols(treated, false);
    const auto fit_c = hackint::fit_ols(control, false);
    const auto budget = budget_from(o);
    const double theta_t = hackint::resolve_theta(budget, fit_t.sse, &fit_t);
    const double theta_c = hackint::resolve_theta(budget, fit_c.sse, &fit_c);
    const auto iv = hackint::ite_interval(treated, control, x_new, theta_t, theta_c);

    json rep = hackint::report_skeleton("ite", o.seed, "ite|" + budget_echo(o), o.deterministic);
    rep["dropped_rows"] = ingest.dropped_rows;
    rep["theta_treated"] = theta_t;
    rep["theta_control"] = theta_c;
    rep["interval"] = hackint::interval_to_json(iv);
    emit(o, rep, csv_interval_row("ite", iv));
    return 0;
}

int svm_exit(const hackint::SvmIntervalResult& res) { return res.degraded ? 4 : 0; }

int run_svm(const CommonOpts& o) {
    const auto ingest = load_dataset(o, false);
    hackint::SvmProblem pr;
    pr.x = ingest.data.x;
    pr.y = ingest.data.y;
    pr.psi_d = o.psi_d;
    pr.x_new = parse_vector(o.xnew);
    pr.seed = o.seed;
    auto [model, min_loss] = hackint::svm_min_loss(pr.x, pr.y, pr.psi_d, pr.seed);
    const auto budget = budget_from(o);
    pr.theta = hackint::resolve_theta(budget, min_loss, nullptr);
    const auto res = hackint::svm_hacking_interval(pr);

    json rep = hackint::report_skeleton("svm", o.seed, "svm|" + budget_echo(o), o.deterministic);
    rep["dropped_rows"] = ingest.dropped_rows;
    rep["result"] = hackint::svm_result_to_json(res);
    emit(o, rep, csv_interval_row("svm", res.interval));
    return svm_exit(res);
}

int run_svm_batch(const CommonOpts& o, const std::string& queries_path, double rel_tol) {
    const auto ingest = load_dataset(o, false);
    const auto qtable = hackint::read_csv(queries_path);
    const auto queries = hackint::numeric_columns(qtable, split_list(o.features));

    int threads = 0;
    if (const char* env = std::getenv("HACKINT_THREADS")) threads = std::atoi(env);
    const auto batch = hackint::svm_interval_batch(ingest.data.x, ingest.data.y, o.psi_d,
                                                   rel_tol, queries, o.seed, threads);

    json rep = hackint::report_skeleton("svm-batch", o.seed,
                                        "svm-batch|rel=" + std::to_string(rel_tol), o.deterministic);
    rep["dropped_rows"] = ingest.dropped_rows;
    rep["min_loss"] = batch.min_loss;
    rep["theta"] = batch.theta;
    json rows = json::array();
    bool degraded = false;
    std::ostringstream csv;
    csv.precision(17);
    csv << "row,lower,upper,stat_at_min_loss,classification\n";
    for (size_t i = 0; i < batch.intervals.size(); ++i) {
        json r = hackint::svm_result_to_json(batch.intervals[i]);
        r["classification"] = hackint::classification_name(batch.classes[i]);
        rows.push_back(r);
        degraded = degraded || batch.intervals[i].degraded;
        const auto& iv = batch.intervals[i].interval;
        csv << i << "," << iv.lower << "," << iv.upper << "," << iv.stat_at_min_loss << ","
            << hackint::classification_name(batch.classes[i]) << "\n";
    }
    rep["results"] = rows;
    emit(o, rep, csv.str());
    return degraded ? 4 : 0;
}

int run_knn(const CommonOpts& o, int k_min, int k_max) {
    const auto ingest = load_dataset(o, false);
    hackint::KnnSpec spec{ingest.data.x, ingest.data.y, parse_vector(o.xnew), k_min, k_max};
    const auto res = hackint::knn_interval(spec);

    json rep = hackint::report_skeleton("knn", o.seed,
                                        "knn|" + std::to_string(k_min) + ".." + std::to_string(k_max),
                                        o.deterministic);
    rep["dropped_rows"] = ingest.dropped_rows;
    rep["interval"] = hackint::interval_to_json(res.interval);
    json trace = json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "k,prediction\n";
    for (const auto& [k, pred] : res.trace) {
        trace.push_back({{"k", k}, {"prediction", pred}});
        csv << k << "," << pred << "\n";
    }
    rep["trace"] = trace;
    emit(o, rep, csv.str());
    return 0;
}

int run_feature(const CommonOpts& o, double or_yw_x, double or_yu, double c, double d) {
    hackint::FeatureHackConstraints cons;
    if (or_yw_x > 0.0) {
        cons.or_yw_x = or_yw_x;
    } else {
        const auto ingest = load_dataset(o, true);
        cons.or_yw_x = estimate_or_yw_x(ingest.data);
    }
    cons.or_yu = or_yu;
    cons.c = c;
    cons.d = d;
    const auto res = hackint::new_feature_interval(cons);

    json rep = hackint::report_skeleton("feature", o.seed, "feature|" + std::to_string(c),
                                        o.deterministic);
    rep["or_yw_x"] = cons.or_yw_x;
    rep["af_min"] = res.af_min;
    rep["af_max"] = res.af_max;
    rep["p1_floored"] = res.p1_floored;
    rep["via_grid"] = res.via_grid;
    rep["interval"] = hackint::interval_to_json(res.interval);
    emit(o, rep, csv_interval_row("feature", res.interval));
    return 0;
}

int run_pca(const CommonOpts& o, int q, int k, double theta_prime, bool standardize,
            bool per_subset) {
    const auto table = hackint::read_csv(o.input);
    const auto cols = o.features.empty() ? table.header : split_list(o.features);
    hackint::PcaSubsetQuery query;
    query.x = hackint::numeric_columns(table, cols);
    query.q = q;
    query.k = k;
    query.theta_prime = theta_prime;
    query.standardize = standardize;
    query.keep_losses = per_subset;
    const auto rep_data = hackint::subset_hacking_report(query);

    json rep = hackint::report_skeleton("pca", o.seed, "pca|" + std::to_string(q), o.deterministic);
    rep["min_loss"] = rep_data.min_loss;
    rep["optimal_subset"] = rep_data.optimal_subset;
    rep["num_within"] = rep_data.num_within;
    rep["features_covered"] = rep_data.features_covered;
    rep["max_hamming"] = rep_data.max_hamming;
    rep["total_subsets"] = rep_data.total_subsets;
    if (per_subset) {
        json losses = json::array();
        for (const auto& [sub, loss] : rep_data.per_subset_losses)
            losses.push_back({{"subset", sub}, {"loss", loss}});
        rep["per_subset_losses"] = losses;
    }
    std::ostringstream csv;
    csv.precision(17);
    csv << "min_loss,num_within,features_covered,max_hamming,total_subsets\n"
        << rep_data.min_loss << "," << rep_data.num_within << "," << rep_data.features_covered
        << "," << rep_data.max_hamming << "," << rep_data.total_subsets << "\n";
    emit(o, rep, csv.str());
    return 0;
}

int run_genbound(const CommonOpts& o, int h, int n, double delta, const std::string& thetas,
                 const std::string& form_name) {
    hackint::GenBoundInput inp;
    inp.h = h;
    inp.n = n;
    inp.delta = delta;
    if (!thetas.empty()) {
        const auto v = parse_vector(thetas);
        if (v.size() != 4)
            throw hackint::Error(hackint::errc::invalid_config, "--thetas needs four values");
        inp.theta1 = v(0);
        inp.theta2 = v(1);
        inp.theta3 = v(2);
        inp.theta4 = v(3);
    }
    const auto form = form_name == "n-over-h" ? hackint::VcLogForm::n_over_h
                                              : hackint::VcLogForm::h_over_n;
    const double bound = hackint::generalization_bound(inp, form);

    json rep = hackint::report_skeleton("genbound", o.seed, "genbound|" + std::to_string(h),
                                        o.deterministic);
    rep["bound"] = bound;
    rep["vc_log_form"] = form_name.empty() ? "h-over-n" : form_name;
    std::ostringstream csv;
    csv.precision(17);
    csv << "bound\n" << bound << "\n";
    emit(o, rep, csv.str());
    return 0;
}

int run_ci_check(const CommonOpts& o, const std::string& kind) {
    const bool is_ate = kind == "ate";
    const auto ingest = load_dataset(o, is_ate);
    const auto fit = hackint::fit_ols(ingest.data, is_ate);
    std::optional<hackint::VectorXd> x_new;
    if (!is_ate) x_new = parse_vector(o.xnew);
    if (o.alpha < 0.0)
        throw hackint::Error(hackint::errc::invalid_alpha, "--alpha is required for ci-check");
    const auto rep_data = hackint::classical_ci_equivalence_check(
        fit, o.alpha, is_ate ? hackint::CiKind::ate : hackint::CiKind::prediction, x_new);

    json rep = hackint::report_skeleton("ci-check", o.seed, "ci-check|" + kind, o.deterministic);
    rep["theta"] = rep_data.theta;
    rep["hacking"] = hackint::interval_to_json(rep_data.hacking);
    rep["classical"] = {{"lower", rep_data.classical_lower}, {"upper", rep_data.classical_upper}};
    rep["max_abs_gap"] = rep_data.max_abs_gap;
    std::ostringstream csv;
    csv.precision(17);
    csv << "hacking_lower,hacking_upper,classical_lower,classical_upper,max_abs_gap\n"
        << rep_data.hacking.lower << "," << rep_data.hacking.upper << ","
        << rep_data.classical_lower << "," << rep_data.classical_upper << ","
        << rep_data.max_abs_gap << "\n";
    emit(o, rep, csv.str());
    return 0;
}

int run_variance(const CommonOpts& o, double sigma2, double v_tt, double r, int n, int p) {
    const double var = hackint::ate_bound_variance(sigma2, v_tt, r, n, p);
    json rep = hackint::report_skeleton("variance", o.seed, "variance", o.deterministic);
    rep["bound_variance"] = var;
    std::ostringstream csv;
    csv.precision(17);
    csv << "bound_variance\n" << var << "\n";
    emit(o, rep, csv.str());
    return 0;
}

int run_sweep_knn(const CommonOpts& o, const std::string& window_spec) {
    const auto ingest = load_dataset(o, false);
    const auto& d = ingest.data;
    const auto x_new = parse_vector(o.xnew);
    const auto dots = window_spec.find("..");
    if (dots == std::string::npos)
        throw hackint::Error(hackint::errc::invalid_config, "--kstar-window expects A..B");
    const int m_lo = std::stoi(window_spec.substr(0, dots));
    const int m_hi = std::stoi(window_spec.substr(dots + 2));
    const int n = static_cast<int>(d.n());
    const int kstar = hackint::knn_select_kstar(d.x, d.y, 1, n - 1);

    json rows = json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "window,k_min,k_max,lower,upper\n";
    for (int m = m_lo; m <= m_hi; ++m) {
        const int k_min = std::max(1, kstar - m);
        const int k_max = std::min(n, kstar + m);
        const auto res = hackint::knn_interval({d.x, d.y, x_new, k_min, k_max});
        rows.push_back({{"window", m},
                        {"k_min", k_min},
                        {"k_max", k_max},
                        {"lower", res.interval.lower},
                        {"upper", res.interval.upper}});
        csv << m << "," << k_min << "," << k_max << "," << res.interval.lower << ","
            << res.interval.upper << "\n";
    }
    json rep = hackint::report_skeleton("sweep", o.seed, "sweep|knn|" + window_spec, o.deterministic);
    rep["kstar"] = kstar;
    rep["rows"] = rows;
    emit(o, rep, csv.str());
    return 0;
}

int run_sweep_feature(const CommonOpts& o, double or_yw_x, const std::string& or_yu_list,
                      const std::string& c_list, double d) {
    hackint::FeatureHackConstraints base;
    base.or_yw_x = or_yw_x;
    base.d = d;
    std::vector<double> cs, oys;
    for (const auto& s : split_list(c_list)) cs.push_back(std::stod(s));
    for (const auto& s : split_list(or_yu_list)) oys.push_back(std::stod(s));
    const auto cells = hackint::new_feature_sweep(base, cs, oys);

    json rows = json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "or_yu,c,lower,upper\n";
    for (const auto& cell : cells) {
        rows.push_back({{"or_yu", cell.or_yu},
                        {"c", cell.c},
                        {"lower", cell.result.interval.lower},
                        {"upper", cell.result.interval.upper}});
        csv << cell.or_yu << "," << cell.c << "," << cell.result.interval.lower << ","
            << cell.result.interval.upper << "\n";
    }
    json rep = hackint::report_skeleton("sweep", o.seed, "sweep|feature", o.deterministic);
    rep["rows"] = rows;
    emit(o, rep, csv.str());
    return 0;
}

int run_simulate(const CommonOpts& o, const std::string& scenario, int n) {
    if (scenario == "scenario1") {
        const auto data = hackint::simulate_treatment_dgp(n > 0 ? n : 500, o.seed);
        const auto fit = hackint::fit_ols(data, true);
        const double theta = hackint::resolve_theta(budget_from(o), fit.sse, &fit);
        const auto iv = hackint::ate_interval(fit, theta);
        json rep = hackint::report_skeleton("simulate", o.seed, "simulate|scenario1|" + budget_echo(o),
                                            o.deterministic);
        rep["scenario"] = "scenario1";
        rep["n"] = n > 0 ? n : 500;
        rep["ground_truth"] = hackint::kTreatmentGroundTruth;
        rep["theta"] = theta;
        rep["interval"] = hackint::interval_to_json(iv);
        emit(o, rep, csv_interval_row("simulate-scenario1", iv));
        return 0;
    }
    if (scenario == "scenario2") {
        const auto data = hackint::simulate_treatment_dgp(n > 0 ? n : 500, o.seed);
        std::vector<Eigen::Index> ti, ci;
        for (Eigen::Index i = 0; i < data.n(); ++i) ((*data.w)(i) == 1.0 ? ti : ci).push_back(i);
        auto arm = [&](const std::vector<Eigen::Index>& rows) {
            hackint::Dataset a;
            a.x.resize(rows.size(), data.p());
            a.y.resize(rows.size());
            for (size_t r = 0; r < rows.size(); ++r) {
                a.x.row(r) = data.x.row(rows[r]);
                a.y(r) = data.y(rows[r]);
            }
            return a;
        };
        const auto treated = arm(ti), control = arm(ci);
        const auto fit_t = hackint::fit_ols(treated, false);
        const auto fit_c = hackint::fit_ols(control, false);
        const auto budget = budget_from(o);
        const double theta_t = hackint::resolve_theta(budget, fit_t.sse, &fit_t);
        const double theta_c = hackint::resolve_theta(budget, fit_c.sse, &fit_c);
        const hackint::VectorXd x_new =
            o.xnew.empty() ? hackint::monomial_features(3.0, 2.0) : parse_vector(o.xnew);
        const auto iv = hackint::ite_interval(treated, control, x_new, theta_t, theta_c);
        json rep = hackint::report_skeleton("simulate", o.seed, "simulate|scenario2|" + budget_echo(o),
                                            o.deterministic);
        rep["scenario"] = "scenario2";
        rep["ground_truth"] = hackint::kTreatmentGroundTruth;
        rep["theta_treated"] = theta_t;
        rep["theta_control"] = theta_c;
        rep["interval"] = hackint::interval_to_json(iv);
        emit(o, rep, csv_interval_row("simulate-scenario2", iv));
        return 0;
    }
    if (scenario == "kernel") {
        const auto data = hackint::simulate_kernel_layout(n > 0 ? n : 40, o.seed);
        hackint::MetricKernelSpec spec;
        spec.x = data.x;
        spec.y = data.y;
        spec.x_new = (hackint::VectorXd(2) << 5.0, 5.0).finished();
        spec.psi_d = o.psi_d;
        spec.opts.seed = o.seed;
        spec.opts.restarts = 6;
        spec.opts.max_iters = 80;
        if (o.theta >= 0.0) {
            spec.theta = o.theta;
        } else if (o.theta_rel >= 0.0) {
            hackint::MetricKernelSpec probe = spec;
            probe.theta = std::numeric_limits<double>::infinity();
            const auto base = hackint::kernel_hacking_interval(probe);
            spec.theta = (1.0 + o.theta_rel) * base.min_loss_found;
        } else {
            spec.theta = 2000.0;
        }
        const auto res = hackint::kernel_hacking_interval(spec);
        json rep = hackint::report_skeleton("simulate", o.seed, "simulate|kernel", o.deterministic);
        rep["scenario"] = "kernel";
        rep["min_loss_found"] = res.min_loss_found;
        rep["interval"] = hackint::interval_to_json(res.interval);
        emit(o, rep, csv_interval_row("simulate-kernel", res.interval));
        return 0;
    }
    if (scenario == "svm") {
        hackint::VectorXd x_new;
        const auto data = hackint::simulate_svm_layout(n > 0 ? n : 15, o.seed, x_new);
        hackint::SvmProblem pr;
        pr.x = data.x;
        pr.y = data.y;
        pr.psi_d = o.psi_d;
        pr.x_new = o.xnew.empty() ? x_new : parse_vector(o.xnew);
        pr.seed = o.seed;
        auto [model, min_loss] = hackint::svm_min_loss(pr.x, pr.y, pr.psi_d, pr.seed);
        pr.theta = hackint::resolve_theta(budget_from(o), min_loss, nullptr);
        const auto res = hackint::svm_hacking_interval(pr);
        json rep = hackint::report_skeleton("simulate", o.seed, "simulate|svm|" + budget_echo(o),
                                            o.deterministic);
        rep["scenario"] = "svm";
        rep["result"] = hackint::svm_result_to_json(res);
        emit(o, rep, csv_interval_row("simulate-svm", res.interval));
        return svm_exit(res);
    }
    throw hackint::Error(hackint::errc::invalid_config,
                         "unknown scenario '" + scenario + "' (scenario1|scenario2|kernel|svm)");
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_budget = true) {
    cmd->add_option("--input", o.input, "input CSV path");
    cmd->add_option("--outcome", o.outcome, "outcome column name");
    cmd->add_option("--treatment", o.treatment, "treatment column name");
    cmd->add_option("--features", o.features, "comma-separated feature columns");
    cmd->add_option("--xnew", o.xnew, "comma-separated query point");
    if (with_budget) {
        cmd->add_option("--theta", o.theta, "absolute loss budget");
        cmd->add_option("--theta-rel", o.theta_rel, "loss budget as (1+r)*min_loss");
        cmd->add_option("--alpha", o.alpha, "classical significance level");
        cmd->add_flag("--sign-flip", o.sign_flip, "budget at which an ATE bound reaches 0");
    }
    cmd->add_option("--psi-d", o.psi_d, "regularization tradeoff / bandwidth");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--out", o.out_path, "write the report to a file");
    cmd->add_option("--format", o.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--deterministic", o.deterministic, "omit the timestamp for byte-stable output");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hacking-interval toolkit"};
    app.require_subcommand(1);
    CommonOpts o;

    auto* ate = app.add_subcommand("ate", "treatment-coefficient interval");
    add_common(ate, o);

    auto* predict = app.add_subcommand("predict", "prediction interval at a new point");
    add_common(predict, o);

    auto* ite = app.add_subcommand("ite", "individual treatment effect interval");
    add_common(ite, o);

    auto* svm = app.add_subcommand("svm", "SVM decision-value interval");
    add_common(svm, o);

    auto* svmb = app.add_subcommand("svm-batch", "per-record SVM intervals");
    add_common(svmb, o, false);
    std::string queries_path;
    double rel_tol = 0.05;
    svmb->add_option("--queries", queries_path, "CSV of query rows")->required();
    svmb->add_option("--rel-tolerance", rel_tol, "loss tolerance relative to the minimum");

    auto* knn = app.add_subcommand("knn", "k-NN prediction interval over a k range");
    add_common(knn, o, false);
    int k_min = 1, k_max = 1;
    knn->add_option("--k-min", k_min, "smallest k")->required();
    knn->add_option("--k-max", k_max, "largest k")->required();

    auto* feature = app.add_subcommand("feature", "added-feature odds-ratio interval");
    add_common(feature, o, false);
    double or_yw_x = -1.0, or_yu = 1.5, cons_c = 0.0, cons_d = 0.0;
    feature->add_option("--or-yw-x", or_yw_x, "observed adjusted odds ratio (else estimated)");
    feature->add_option("--or-yu", or_yu, "new-feature outcome odds ratio")->required();
    feature->add_option("--c", cons_c, "bound on |p1 - p0|")->required();
    feature->add_option("--d", cons_d, "lower bound on p0");

    auto* pca = app.add_subcommand("pca", "PCA feature-subset report");
    add_common(pca, o, false);
    int pca_q = 2, pca_k = 2;
    double theta_prime = 0.0;
    bool standardize = false, per_subset = false;
    pca->add_option("--q", pca_q, "subset size")->required();
    pca->add_option("--k", pca_k, "score columns compared")->required();
    pca->add_option("--theta-prime", theta_prime, "tolerance above the minimum loss");
    pca->add_flag("--standardize", standardize, "standardize columns before PCA");
    pca->add_flag("--per-subset-losses", per_subset, "include the full loss table");

    auto* genb = app.add_subcommand("genbound", "generalization bound for hacked data");
    add_common(genb, o, false);
    int gb_h = 1, gb_n = 1;
    double gb_delta = 0.05;
    std::string gb_thetas, gb_form = "h-over-n";
    genb->add_option("--h-dim", gb_h, "VC dimension")->required();
    genb->add_option("--n-obs", gb_n, "sample count")->required();
    genb->add_option("--delta", gb_delta, "confidence level");
    genb->add_option("--thetas", gb_thetas, "theta1,theta2,theta3,theta4");
    genb->add_option("--vc-log-form", gb_form, "h-over-n|n-over-h")
        ->check(CLI::IsMember({"h-over-n", "n-over-h"}));

    auto* cic = app.add_subcommand("ci-check", "hacking vs classical interval equivalence");
    add_common(cic, o);
    std::string ci_kind = "ate";
    cic->add_option("--kind", ci_kind, "ate|predict")->check(CLI::IsMember({"ate", "predict"}));

    auto* var = app.add_subcommand("variance", "variance of the ATE interval bounds");
    add_common(var, o, false);
    double v_sigma2 = 1.0, v_vtt = 1.0, v_r = 0.1;
    int v_n = 2, v_p = 0;
    var->add_option("--sigma2", v_sigma2)->required();
    var->add_option("--v-tt", v_vtt)->required();
    var->add_option("--r", v_r)->required();
    var->add_option("--n-obs", v_n)->required();
    var->add_option("--p-dim", v_p)->required();

    auto* sweep = app.add_subcommand("sweep", "tabulated interval sweeps");
    sweep->require_subcommand(1);
    auto* sweep_knn = sweep->add_subcommand("knn", "k-NN intervals over widening windows");
    add_common(sweep_knn, o, false);
    std::string window_spec = "1..5";
    sweep_knn->add_option("--kstar-window", window_spec, "window range A..B around k*");
    auto* sweep_feature = sweep->add_subcommand("feature", "odds-ratio intervals over a grid");
    add_common(sweep_feature, o, false);
    double sf_or = 1.25, sf_d = 0.0;
    std::string sf_cs = "0.1,0.15,0.2,0.25,0.3", sf_oys = "1.5,1.75";
    sweep_feature->add_option("--or-yw-x", sf_or, "observed adjusted odds ratio")->required();
    sweep_feature->add_option("--c-list", sf_cs, "comma-separated c values");
    sweep_feature->add_option("--or-yu-list", sf_oys, "comma-separated OR_yu values");
    sweep_feature->add_option("--d", sf_d, "lower bound on p0");

    auto* sim = app.add_subcommand("simulate", "regenerate the illustration layouts");
    add_common(sim, o);
    std::string scenario;
    int sim_n = 0;
    sim->add_option("scenario", scenario, "scenario1|scenario2|kernel|svm")->required();
    sim->add_option("--n", sim_n, "observations");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ate->parsed()) return run_ate(o);
        if (predict->parsed()) return run_predict(o);
        if (ite->parsed()) return run_ite(o);
        if (svm->parsed()) return run_svm(o);
        if (svmb->parsed()) return run_svm_batch(o, queries_path, rel_tol);
        if (knn->parsed()) return run_knn(o, k_min, k_max);
        if (feature->parsed()) return run_feature(o, or_yw_x, or_yu, cons_c, cons_d);
        if (pca->parsed()) return run_pca(o, pca_q, pca_k, theta_prime, standardize, per_subset);
        if (genb->parsed()) return run_genbound(o, gb_h, gb_n, gb_delta, gb_thetas, gb_form);
        if (cic->parsed()) return run_ci_check(o, ci_kind);
        if (var->parsed()) return run_variance(o, v_sigma2, v_vtt, v_r, v_n, v_p);
        if (sweep->parsed()) {
            if (sweep_knn->parsed()) return run_sweep_knn(o, window_spec);
            if (sweep_feature->parsed()) return run_sweep_feature(o, sf_or, sf_oys, sf_cs, sf_d);
        }
        if (sim->parsed()) return run_simulate(o, scenario, sim_n);
    } catch (const hackint::Error& e) {
        hackint::json err;
        err["error"] = hackint::errc_name(e.code());
        err["message"] = e.what();
        err["exit_code"] = hackint::exit_code_for(e.code());
        std::cerr << err.dump(2) << "\n";
        return hackint::exit_code_for(e.code());
    } catch (const std::exception& e) {
        hackint::json err;
        err["error"] = "Internal";
        err["message"] = e.what();
        err["exit_code"] = 2;
        std::cerr << err.dump(2) << "\n";
        return 2;
    }
    return 0;
}
