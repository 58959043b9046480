#include "singboost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "singboost/rng.hpp"
#include <json.hpp>

namespace singboost {

namespace {

double population_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double population_variance(std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v) {
        const double d = x - mean;
        s += d * d;
    }
    return s / static_cast<double>(v.size());
}

// Shortest text that round-trips a binary64 exactly.
std::string format_double(double v) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::from_chars(buf, buf + std::strlen(buf), back);
        if (back == v) break;
    }
    return buf;
}

}  // namespace

Dataset make_dataset(std::size_t n, std::size_t p, std::vector<double> x,
                     std::vector<double> y, std::vector<std::string> column_names) {
    if (n < 2) throw std::invalid_argument("dataset: need at least 2 rows");
    if (p < 1) throw std::invalid_argument("dataset: need at least 1 column");
    if (x.size() != n * p) throw std::invalid_argument("dataset: x size mismatch");
    if (y.size() != n) throw std::invalid_argument("dataset: y size mismatch");
    if (column_names.size() != p)
        throw std::invalid_argument("dataset: column_names size mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite entry in x");
    for (double v : y)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite entry in y");
    std::unordered_set<std::string> seen;
    for (const auto& name : column_names)
        if (!seen.insert(name).second)
            throw std::invalid_argument("dataset: duplicate column name '" + name + "'");
    Dataset d;
    d.n = n;
    d.p = p;
    d.x = std::move(x);
    d.y = std::move(y);
    d.column_names = std::move(column_names);
    return d;
}

StandardizeResult standardize(const Dataset& d) {
    Standardization t;
    t.means.resize(d.p);
    t.sds.resize(d.p);
    t.original_names = d.column_names;
    t.y_mean = population_mean(d.y);

    for (std::size_t j = 0; j < d.p; ++j) {
        const auto col = d.column(j);
        t.means[j] = population_mean(col);
        const double var = population_variance(col, t.means[j]);
        t.sds[j] = std::sqrt(var);
    }

    StandardizeResult out;
    for (std::size_t j = 0; j < d.p; ++j) {
        if (t.sds[j] > 0.0) {
            t.kept.push_back(j);
        } else {
            t.dropped.push_back(j);
            out.warnings.push_back("column '" + d.column_names[j] +
                                   "' has zero variance and was dropped");
        }
    }
    if (t.kept.empty()) throw std::invalid_argument("standardize: no usable predictors");

    Dataset s;
    s.n = d.n;
    s.p = t.kept.size();
    s.x.resize(s.n * s.p);
    s.y.resize(s.n);
    for (std::size_t k = 0; k < t.kept.size(); ++k) {
        const std::size_t j = t.kept[k];
        const auto col = d.column(j);
        for (std::size_t i = 0; i < d.n; ++i)
            s.x[k * s.n + i] = (col[i] - t.means[j]) / t.sds[j];
        s.column_names.push_back(d.column_names[j]);
    }
    for (std::size_t i = 0; i < d.n; ++i) s.y[i] = d.y[i] - t.y_mean;

    out.data = std::move(s);
    out.transform = std::move(t);
    return out;
}

Dataset destandardize(const Dataset& standardized, const Standardization& t) {
    const std::size_t p = t.original_p();
    if (standardized.p != t.kept.size())
        throw std::invalid_argument("destandardize: column count mismatch");
    Dataset d;
    d.n = standardized.n;
    d.p = p;
    d.x.resize(d.n * p);
    d.y.resize(d.n);
    d.column_names = t.original_names;
    for (std::size_t k = 0; k < t.kept.size(); ++k) {
        const std::size_t j = t.kept[k];
        const auto col = standardized.column(k);
        for (std::size_t i = 0; i < d.n; ++i)
            d.x[j * d.n + i] = col[i] * t.sds[j] + t.means[j];
    }
    for (std::size_t j : t.dropped)
        for (std::size_t i = 0; i < d.n; ++i) d.x[j * d.n + i] = t.means[j];
    for (std::size_t i = 0; i < d.n; ++i) d.y[i] = standardized.y[i] + t.y_mean;
    return d;
}

SyntheticData simulate_gaussian_linear(const SyntheticSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("simulate: n must be at least 2");
    if (spec.p < 1) throw std::invalid_argument("simulate: p must be at least 1");
    if (spec.s0 > spec.p) throw std::invalid_argument("simulate: s0 must not exceed p");
    if (!(spec.snr > 0.0)) throw std::invalid_argument("simulate: snr must be positive");

    Rng rng(spec.seed);
    SyntheticData out;
    out.spec = spec;
    Dataset d;
    d.n = spec.n;
    d.p = spec.p;
    d.x.resize(spec.n * spec.p);
    for (std::size_t j = 0; j < spec.p; ++j)
        for (std::size_t i = 0; i < spec.n; ++i) d.x[j * spec.n + i] = rng.normal();
    for (std::size_t j = 0; j < spec.p; ++j) d.column_names.push_back("x" + std::to_string(j + 1));

    out.support = rng.sample_without_replacement(spec.p, spec.s0);
    std::sort(out.support.begin(), out.support.end());

    out.true_beta.assign(spec.p, 0.0);
    double beta_sq = 0.0;
    for (std::size_t j : out.support) {
        const double magnitude = 0.5 + 1.5 * rng.uniform01();
        const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        out.true_beta[j] = sign * magnitude;
        beta_sq += out.true_beta[j] * out.true_beta[j];
    }

    // Columns are iid standard normal, so Var(X beta) = ||beta||^2. Null
    // models (s0 == 0) fall back to unit-variance noise.
    out.noise_sd = beta_sq > 0.0 ? std::sqrt(beta_sq / spec.snr) : 1.0;

    d.y.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        double signal = 0.0;
        for (std::size_t j : out.support) signal += d.x[j * spec.n + i] * out.true_beta[j];
        d.y[i] = signal;
    }
    for (std::size_t i = 0; i < spec.n; ++i) d.y[i] += out.noise_sd * rng.normal();

    out.data = std::move(d);
    return out;
}

Dataset load_csv(const std::string& path, const std::string& target) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    std::size_t target_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == target) target_idx = j;
    if (target_idx == header.size())
        throw std::invalid_argument("load_csv: target column '" + target + "' not found");

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            double v = 0.0;
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last || !std::isfinite(v))
                throw std::invalid_argument("load_csv: non-numeric cell '" + cell + "' at row " +
                                            std::to_string(lineno) + ", column '" +
                                            (col < header.size() ? header[col] : "?") + "'");
            row.push_back(v);
            ++col;
        }
        if (row.size() != header.size())
            throw std::invalid_argument("load_csv: row " + std::to_string(lineno) + " has " +
                                        std::to_string(row.size()) + " cells, expected " +
                                        std::to_string(header.size()));
        rows.push_back(std::move(row));
    }

    const std::size_t n = rows.size();
    const std::size_t p = header.size() - 1;
    if (p < 1) throw std::invalid_argument("load_csv: no predictor columns besides target");
    std::vector<double> x(n * p), y(n);
    std::vector<std::string> names;
    names.reserve(p);
    std::size_t out_j = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j == target_idx) continue;
        names.push_back(header[j]);
        for (std::size_t i = 0; i < n; ++i) x[out_j * n + i] = rows[i][j];
        ++out_j;
    }
    for (std::size_t i = 0; i < n; ++i) y[i] = rows[i][target_idx];
    return make_dataset(n, p, std::move(x), std::move(y), std::move(names));
}

void save_csv(const Dataset& d, const std::string& path, const std::string& target_name) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot write file '" + path + "'");
    for (std::size_t j = 0; j < d.p; ++j) out << d.column_names[j] << ',';
    out << target_name << '\n';
    for (std::size_t i = 0; i < d.n; ++i) {
        for (std::size_t j = 0; j < d.p; ++j) out << format_double(d.at(i, j)) << ',';
        out << format_double(d.y[i]) << '\n';
    }
    if (!out) throw std::runtime_error("save_csv: write failed for '" + path + "'");
}

void save_truth_json(const SyntheticData& s, const std::string& path) {
    nlohmann::json j;
    j["seed"] = s.spec.seed;
    std::vector<std::size_t> support_1b;  // 1-based column numbers
    for (std::size_t idx : s.support) support_1b.push_back(idx + 1);
    j["support"] = support_1b;
    j["true_beta"] = s.true_beta;
    j["noise_sd"] = s.noise_sd;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_truth_json: cannot write file '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace singboost
