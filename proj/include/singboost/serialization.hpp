#pragma once

#include <string>

#include "singboost/boosting.hpp"
#include "singboost/measures.hpp"

namespace singboost {

// File formats. Column identifiers in every emitted file are 1-based, matching
// the beta_1..beta_p naming of the path export; in-memory indices are 0-based.

std::string model_to_json(const LinearModel& model);
LinearModel model_from_json(const std::string& text);
void save_model_json(const LinearModel& model, const std::string& path);
LinearModel load_model_json(const std::string& path);

// CSV "iter,column,increment,intercept_increment,risk_l2,risk_target,singular,corr_ratio".
void save_trace_csv(const FitTrace& trace, const std::string& path);

// CSV "iter,intercept,beta_1..beta_p", one row per iteration plus row 0.
void save_paths_csv(const LinearModel& model, const std::string& path);

void save_corr_min_json(const CorrMinReport& report, const std::string& path);

std::string measure_to_json(const ColumnMeasure& m);
ColumnMeasure measure_from_json(const std::string& text);
void save_measure_json(const ColumnMeasure& m, const std::string& path);
ColumnMeasure load_measure_json(const std::string& path);

void save_singular_part_json(const SingularPartReport& report, const std::string& path);

}  // namespace singboost
