#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "singboost/boosting.hpp"
#include "singboost/dataset.hpp"
#include "singboost/rng.hpp"

namespace singboost {

enum class MeasureMode { Frequency, Indicator };

// Selection mass per column, in [0,1]. Frequency measures divide selection
// counts by the configured iteration budget; indicator measures are 0/1.
struct ColumnMeasure {
    std::vector<double> mass;
    std::string origin_loss;
    MeasureMode mode = MeasureMode::Frequency;
};

ColumnMeasure make_column_measure(std::vector<double> mass, std::string origin_loss,
                                  MeasureMode mode);

// Weights on observations; generalizes subsampling and bootstrap schemes.
struct RowMeasure {
    std::vector<double> weight;  // entries in [0,1], not all zero
};

RowMeasure make_row_measure(std::vector<double> weight);
RowMeasure uniform_row_measure(std::size_t n);

ColumnMeasure column_measure_from_trace(const FitTrace& trace, MeasureMode mode,
                                        std::string origin_loss = "");

struct SubsampleOptions {
    std::size_t size = 0;           // rows per draw; 0 means floor(n/2)
    bool with_replacement = false;  // bootstrap instead of subsampling
};

using FitProcedure = std::function<LinearModel(const Dataset&)>;

// Average of per-subsample column measures over b row draws from zeta
// (without replacement by default). Draw i uses its own seed, so the result
// is a symmetric function of the seed list. mode selects the per-fit measure;
// the aggregate is always frequency-valued.
ColumnMeasure induced_column_measure(const Dataset& d, const RowMeasure& zeta,
                                     std::span<const std::uint64_t> draw_seeds,
                                     const FitProcedure& fit, MeasureMode mode,
                                     const SubsampleOptions& opts = {});
ColumnMeasure induced_column_measure(const Dataset& d, const RowMeasure& zeta,
                                     std::size_t b, const FitProcedure& fit,
                                     MeasureMode mode, const SubsampleOptions& opts,
                                     std::uint64_t seed);

// Columns nu_tilde charges but nu does not (its singular part w.r.t. nu),
// plus the complementary Lebesgue split of nu_tilde.
struct SingularPartReport {
    std::vector<std::size_t> j_sing;    // nu == 0 and nu_tilde > 0
    std::vector<std::size_t> j_common;  // both positive
    bool dominated = false;             // true iff j_sing is empty
    ColumnMeasure absolutely_continuous;  // nu_tilde off the singular set
    ColumnMeasure singular;               // nu_tilde on the singular set
};

SingularPartReport singular_part(const ColumnMeasure& nu_tilde, const ColumnMeasure& nu);

// Sampler state for drawing columns from nu_tilde while proposing from nu_l,
// with a dedicated branch for the singular candidates nu_l never visits.
struct RejectState {
    ColumnMeasure nu_l;
    ColumnMeasure nu_tilde;  // floored at epsilon on the singular set
    std::vector<std::size_t> j_c;  // nu_l > 0
    std::vector<std::size_t> j_s;  // complement
    double w_c = 0.0;   // |j_c| / p
    double w_s = 0.0;   // 1 - w_c
    double big_w_s = 0.0;  // sum of nu_tilde over j_s
    double h_bound = 0.0;  // max over j_c of nu_tilde/nu_l
    std::vector<bool> active;  // candidate set for the proposal branch
    std::uint64_t rng_seed = 0;
    Rng rng{0};
    std::uint64_t proposals = 0;
    std::uint64_t acceptances = 0;
    std::uint64_t singular_draws = 0;
    std::uint64_t resets = 0;  // active set exhausted without acceptance
};

RejectState reject_init(const ColumnMeasure& nu_l, const ColumnMeasure& nu_tilde,
                        double epsilon_floor, std::uint64_t seed);

// Emits the next accepted column (0-based) and advances the state: with
// probability w_s a singular-branch draw from nu_tilde over j_s, otherwise a
// proposal from nu_l over the active set accepted with probability
// nu_tilde/(h_bound * nu_l); rejected columns leave the active set until the
// next acceptance or singular draw.
std::size_t reject_next(RejectState& state);

// Exact distribution of reject_next's output, by enumerating the active-set
// Markov chain. Requires |j_c| <= max_common (memory is O(2^|j_c|)).
std::vector<double> rejection_implied_law(const RejectState& state,
                                          std::size_t max_common = 16);

double total_variation(std::span<const double> a, std::span<const double> b);

}  // namespace singboost
