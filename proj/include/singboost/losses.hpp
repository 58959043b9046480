#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace singboost {

enum class LossKind { L2, L1, Huber, Check, HardRank };

// Loss contract used throughout: empirical risk evaluation plus, for the
// differentiable kinds, the negative functional gradient. HardRank is the
// pairwise misranking fraction; it has no gradient.
struct LossSpec {
    LossKind kind = LossKind::L2;
    double delta = 1.345;  // Huber threshold
    double tau = 0.5;      // Check quantile level, in (0,1)

    bool differentiable() const { return kind != LossKind::HardRank; }
    std::string name() const;

    static LossSpec l2() { return {LossKind::L2}; }
    static LossSpec l1() { return {LossKind::L1}; }
    static LossSpec huber(double delta = 1.345);
    static LossSpec check(double tau = 0.5);
    static LossSpec hard_rank() { return {LossKind::HardRank}; }

    // Accepts "l2", "l1", "huber:<delta>", "check:<tau>", "hardrank";
    // parameter suffixes are optional.
    static LossSpec parse(const std::string& text);
};

// Empirical risk. Pointwise losses return the mean per-observation loss
// (L2 uses (y-f)^2/2); HardRank returns the fraction of ordered pairs
// i != j with (y_i - y_j)(yhat_i - yhat_j) < 0, evaluated by the naive
// O(n^2) double loop. Ties in y or yhat contribute nothing.
double risk(const LossSpec& loss, std::span<const double> y, std::span<const double> yhat);

// Same value as risk(hard_rank(), ...) but O(n log n): sort by (y, yhat) and
// count strict inversions of yhat with a merge sort.
double hard_rank_loss_fast(std::span<const double> y, std::span<const double> yhat);

// Exact ordered-pair discordance counts backing the two evaluators above.
std::uint64_t hard_rank_discordant_naive(std::span<const double> y,
                                         std::span<const double> yhat);
std::uint64_t hard_rank_discordant_fast(std::span<const double> y,
                                        std::span<const double> yhat);

// U_i = -d/df L(y_i, f)|_{f=f_i}. L1 and Check use subgradient 0 at a zero
// residual. Throws for HardRank.
std::vector<double> neg_gradient(const LossSpec& loss, std::span<const double> y,
                                 std::span<const double> f);

// argmin_c sum_i L(y_i, c): mean for L2, median for L1, tau-quantile for
// Check, Newton iteration for Huber.
double offset_minimizer(const LossSpec& loss, std::span<const double> y);

}  // namespace singboost
