#pragma once

#include <cstddef>
#include <vector>

#include "singboost/dataset.hpp"
#include "singboost/measures.hpp"

namespace singboost {

// Least-squares influence curve of the linear model evaluated at theta:
// eta(x_i, y_i) = Sigma^{-1} x_i (y_i - x_i' theta) with Sigma = X'X/n.
// At the least-squares fit the eta columns average to zero, and against the
// Gaussian score x (y - x'theta)/sigma^2 they average to the identity.
struct InfluenceEvaluation {
    std::vector<double> eta;        // row-major n x p
    std::vector<double> sigma_hat;  // row-major p x p second-moment matrix
    std::vector<double> theta_ref;
    double sigma2_hat = 0.0;  // residual variance at theta_ref
    std::size_t n = 0;
    std::size_t p = 0;

    double eta_at(std::size_t i, std::size_t j) const { return eta[i * p + j]; }
};

InfluenceEvaluation influence_eval(const Dataset& d, const std::vector<double>& theta);

// Gaussian linear-model score at theta: row i equals x_i (y_i - x_i'theta)
// divided by sigma2. Used to check the influence-curve pairing empirically.
std::vector<double> gaussian_score(const Dataset& d, const std::vector<double>& theta,
                                   double sigma2);

// One Newton-type correction: theta + mean_i eta_theta(x_i, y_i).
std::vector<double> one_step(const Dataset& d, const std::vector<double>& theta_start);

// one_step iterated k times, re-evaluating the influence curve each round.
std::vector<double> k_step(const Dataset& d, const std::vector<double>& theta_start,
                           std::size_t k);

// Ascending, in-range, non-empty column subset used for reduced estimation.
using SupportSet = std::vector<std::size_t>;

// one_step on the columns in support; the result is embedded back into p
// dimensions with zeros elsewhere. theta_start must vanish off the support.
std::vector<double> reduced_one_step(const Dataset& d, const SupportSet& support,
                                     const std::vector<double>& theta_start);

// Hadamard product of a one-step estimate with a column measure: each
// component is shrunk by its empirical selection relevance.
std::vector<double> expected_one_step(const std::vector<double>& s1,
                                      const ColumnMeasure& nu);

}  // namespace singboost
