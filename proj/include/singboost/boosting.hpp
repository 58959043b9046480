#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "singboost/dataset.hpp"
#include "singboost/losses.hpp"

namespace singboost {

struct BoostConfig {
    double kappa = 0.1;          // step size, in (0,1]
    std::size_t m_iter = 100;    // total iterations
    std::size_t M = 5;           // every M-th iteration is singular (SingBoost)
    LossSpec target_loss = LossSpec::l2();
    bool ls_mode = true;         // singular steps use least-squares baselearners
    std::uint64_t seed = 0;      // carried for provenance; the fitters are deterministic
};

// One boosting update. Column indices refer to the original dataset; -1 marks
// a record that only moved the intercept. Increments are in standardized
// coordinates; risks are evaluated on the training data after the update.
struct IterationRecord {
    std::size_t index = 0;  // 1-based
    long selected_column = -1;
    double coefficient_increment = 0.0;
    double intercept_increment = 0.0;
    double training_risk_l2 = 0.0;
    double training_risk_target = 0.0;
    bool is_singular = false;
    std::optional<double> corr_ratio;  // singular iterations only
};

struct FitTrace {
    std::size_t p = 0;       // original column count
    std::size_t m_iter = 0;  // configured iteration budget
    double initial_offset = 0.0;  // standardized-coordinate offset (row 0 of the path)
    std::vector<IterationRecord> iterations;
    std::optional<std::size_t> stopped_at;  // iteration that found no usable column
};

// Fitted model in original coordinates, plus the trace and the transform the
// fit ran under.
struct LinearModel {
    double intercept = 0.0;
    std::vector<double> beta;  // length = original p; zeros on dropped columns
    FitTrace trace;
    Standardization standardization;
    BoostConfig config;
    std::string fitter;  // "l2boost" | "generic" | "singboost"
};

std::vector<double> predict(const LinearModel& model, const Dataset& d);

// Componentwise least-squares boosting: every iteration picks the column with
// the largest absolute inner product with the current residual (ties to the
// lowest index), adds kappa times its simple least-squares coefficient, and
// stops early once no column correlates with the residual.
LinearModel fit_l2boost(const Dataset& d, const BoostConfig& cfg);

// Functional gradient boosting for a differentiable target loss: offsets at
// argmin_c sum L(y,c), fits the componentwise baselearner to the negative
// gradient each iteration. Refuses non-differentiable losses.
LinearModel fit_generic(const Dataset& d, const BoostConfig& cfg);

// SingBoost: floor(m_iter/M) rounds of one singular iteration followed by
// M-1 plain least-squares iterations. A singular iteration with ls_mode
// scores every column's least-squares update directly in the target loss and
// takes the argmin; with ls_mode == false it takes one gradient step instead
// (requires a differentiable target).
LinearModel fit_singboost(const Dataset& d, const BoostConfig& cfg);

// Ratio of the selected column's residual inner product to the best one, per
// singular iteration, plus the minimum across them. Values lie in [0,1];
// plain least-squares selection attains 1 by construction.
struct CorrMinReport {
    std::vector<std::size_t> iteration;  // 1-based indices of singular iterations
    std::vector<double> ratio;
    std::optional<double> min_ratio;
};

CorrMinReport corr_min_report(const FitTrace& trace);

// Coefficient evolution in standardized coordinates: row k holds
// [intercept, beta_1..beta_p] after iteration k, row 0 is the offset alone.
// Consecutive rows differ in at most one beta entry plus the intercept.
std::vector<std::vector<double>> coefficient_paths(const LinearModel& model);

// Thread budget for the per-iteration column scans, from SINGBOOST_THREADS
// (default 1). Selection is index-ordered and deterministic either way.
unsigned thread_budget();

}  // namespace singboost
