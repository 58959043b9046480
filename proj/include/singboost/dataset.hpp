#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace singboost {

// Regression data: regressor matrix X (n rows, p columns, stored
// column-major) plus response y. Immutable after construction; safe to share
// across threads.
struct Dataset {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> x;  // column-major, size n * p
    std::vector<double> y;  // size n
    std::vector<std::string> column_names;  // size p, unique

    std::span<const double> column(std::size_t j) const {
        return {x.data() + j * n, n};
    }
    double at(std::size_t i, std::size_t j) const { return x[j * n + i]; }
};

// Validates the Dataset invariants (n >= 2, p >= 1, finite entries, unique
// column names) and returns the assembled value. Throws std::invalid_argument.
Dataset make_dataset(std::size_t n, std::size_t p, std::vector<double> x,
                     std::vector<double> y, std::vector<std::string> column_names);

// Column-wise affine transform fitted by standardize(). means/sds cover all
// original columns; sds[j] == 0 marks a dropped (zero-variance) column.
struct Standardization {
    std::vector<double> means;
    std::vector<double> sds;
    double y_mean = 0.0;
    std::vector<std::size_t> kept;     // original indices of retained columns
    std::vector<std::size_t> dropped;  // original indices of constant columns
    std::vector<std::string> original_names;

    std::size_t original_p() const { return means.size(); }
};

struct StandardizeResult {
    Dataset data;  // retained columns, each with mean 0 and variance 1; y centered
    Standardization transform;
    std::vector<std::string> warnings;  // one entry per dropped column
};

// Centers and scales every column to empirical mean 0 and variance 1
// (variance with divisor n, so that <x_j, x_j>/n == 1), centers y by its
// mean. Zero-variance columns are dropped and logged as warnings. Throws if
// no column survives.
StandardizeResult standardize(const Dataset& d);

// Inverse of standardize(): rebuilds the original dataset, including dropped
// constant columns, in original column order.
Dataset destandardize(const Dataset& standardized, const Standardization& t);

// Synthetic Gaussian linear model: X iid standard normal, s0 active
// coefficients with magnitudes uniform on [0.5, 2] and random sign, noise
// variance set so Var(X beta) / Var(eps) equals snr.
struct SyntheticSpec {
    std::size_t n = 100;
    std::size_t p = 50;
    std::size_t s0 = 10;
    double snr = 2.0;
    std::uint64_t seed = 1;
};

struct SyntheticData {
    Dataset data;                      // columns named x1..xp, response y
    std::vector<double> true_beta;     // length p
    std::vector<std::size_t> support;  // ascending indices of nonzero betas
    double noise_sd = 0.0;
    SyntheticSpec spec;
};

// Deterministic in the seed: identical spec gives bit-identical output.
// When s0 == 0 the response is pure unit-variance noise.
SyntheticData simulate_gaussian_linear(const SyntheticSpec& spec);

// CSV I/O. Format: header row, comma separators, decimal point, no quoting.
Dataset load_csv(const std::string& path, const std::string& target);
void save_csv(const Dataset& d, const std::string& path,
              const std::string& target_name = "y");

// Sidecar with the simulation truth, written next to the data CSV.
void save_truth_json(const SyntheticData& s, const std::string& path);

}  // namespace singboost
