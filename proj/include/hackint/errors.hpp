#pragma once

#include <stdexcept>
#include <string>

namespace hackint {

// Error taxonomy. Every failure surfaced by the library carries one of these
// codes; the CLI maps each category to a process exit code.
enum class errc {
    dimension_mismatch,
    singular_gram,
    theta_below_min_loss,
    missing_treatment,
    missing_fit_context,
    dof_nonpositive,
    invalid_alpha,
    negative_sqrt_argument,
    single_class,
    empty_range,
    degenerate_denominator,
    all_weights_underflow,
    no_feasible_point,
    rank_deficient,
    subset_space_too_large,
    no_feasible_sample,
    missing_column,
    non_numeric_cell,
    empty_after_filtering,
    invalid_config,
};

// Exit-code categories: 2 = data/config error, 3 = infeasible loss budget.
// Solver degradation (exit 4) is signaled through result flags, not thrown.
inline int exit_code_for(errc c) {
    switch (c) {
        case errc::theta_below_min_loss:
        case errc::no_feasible_point:
        case errc::no_feasible_sample:
            return 3;
        default:
            return 2;
    }
}

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::singular_gram: return "SingularGram";
        case errc::theta_below_min_loss: return "ThetaBelowMinLoss";
        case errc::missing_treatment: return "MissingTreatment";
        case errc::missing_fit_context: return "MissingFitContext";
        case errc::dof_nonpositive: return "DegreesOfFreedomNonpositive";
        case errc::invalid_alpha: return "InvalidAlpha";
        case errc::negative_sqrt_argument: return "NegativeSqrtArgument";
        case errc::single_class: return "SingleClass";
        case errc::empty_range: return "EmptyRange";
        case errc::degenerate_denominator: return "DegenerateDenominator";
        case errc::all_weights_underflow: return "AllWeightsUnderflow";
        case errc::no_feasible_point: return "NoFeasiblePoint";
        case errc::rank_deficient: return "RankDeficient";
        case errc::subset_space_too_large: return "SubsetSpaceTooLarge";
        case errc::no_feasible_sample: return "NoFeasibleSample";
        case errc::missing_column: return "MissingColumn";
        case errc::non_numeric_cell: return "NonNumericCell";
        case errc::empty_after_filtering: return "EmptyAfterFiltering";
        case errc::invalid_config: return "InvalidConfig";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

} // namespace hackint
