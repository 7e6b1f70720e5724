#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hackint/errors.hpp"

namespace hackint {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Observed data: covariate matrix, outcomes, and an optional binary
// treatment indicator. No implicit intercept; callers append a ones
// column themselves when they want one.
struct Dataset {
    MatrixXd x;
    VectorXd y;
    std::optional<VectorXd> w;
    std::vector<std::string> names;

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index p() const { return x.cols(); }

    void validate() const {
        if (x.rows() < 1 || x.cols() < 1)
            throw Error(errc::dimension_mismatch, "need n >= 1 and p >= 1");
        if (y.size() != x.rows())
            throw Error(errc::dimension_mismatch, "outcome length does not match row count");
        if (w && w->size() != x.rows())
            throw Error(errc::dimension_mismatch, "treatment length does not match row count");
        if (!x.allFinite() || !y.allFinite())
            throw Error(errc::dimension_mismatch, "non-finite entries in data");
        if (w) {
            for (Eigen::Index i = 0; i < w->size(); ++i) {
                const double v = (*w)(i);
                if (v != 0.0 && v != 1.0)
                    throw Error(errc::non_numeric_cell,
                                "treatment entry at row " + std::to_string(i) + " is not 0/1");
            }
        }
        if (!names.empty() && static_cast<Eigen::Index>(names.size()) != x.cols())
            throw Error(errc::dimension_mismatch, "column label count does not match p");
    }
};

// Min/max of a summary statistic over the loss-feasible model set, plus the
// witness models attaining each bound. Witness layout depends on the
// producing operation and is described by `witness_layout`.
struct HackingInterval {
    double lower = 0.0;
    double upper = 0.0;
    double stat_at_min_loss = 0.0;
    double theta = 0.0;
    VectorXd witness_lower;
    VectorXd witness_upper;
    std::string witness_layout;

    double width() const { return upper - lower; }
    bool contains(double v) const { return lower <= v && v <= upper; }
};

} // namespace hackint
