#include "singboost/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace singboost {

namespace {

// In-place Cholesky factorization of a symmetric matrix, row-major. Throws
// when a pivot degenerates relative to the largest diagonal entry.
std::vector<double> cholesky(const std::vector<double>& a, std::size_t p) {
    std::vector<double> l(p * p, 0.0);
    double max_diag = 0.0;
    for (std::size_t j = 0; j < p; ++j) max_diag = std::max(max_diag, std::abs(a[j * p + j]));
    if (!(max_diag > 0.0)) throw std::runtime_error("design not full rank");
    const double floor = max_diag * 1e-12;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * p + k] * l[j * p + k];
            if (i == j) {
                if (!(s > floor)) throw std::runtime_error("design not full rank");
                l[i * p + i] = std::sqrt(s);
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    return l;
}

// Solves L L' x = b.
std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t p,
                                   const std::vector<double>& b) {
    std::vector<double> x(b);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < i; ++k) x[i] -= l[i * p + k] * x[k];
        x[i] /= l[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < p; ++k) x[ii] -= l[k * p + ii] * x[k];
        x[ii] /= l[ii * p + ii];
    }
    return x;
}

std::vector<double> second_moment(const Dataset& d) {
    const auto n = static_cast<double>(d.n);
    std::vector<double> sigma(d.p * d.p, 0.0);
    for (std::size_t a = 0; a < d.p; ++a) {
        const auto ca = d.column(a);
        for (std::size_t b = a; b < d.p; ++b) {
            const auto cb = d.column(b);
            double s = 0.0;
            for (std::size_t i = 0; i < d.n; ++i) s += ca[i] * cb[i];
            sigma[a * d.p + b] = s / n;
            sigma[b * d.p + a] = s / n;
        }
    }
    return sigma;
}

std::vector<double> residuals(const Dataset& d, const std::vector<double>& theta) {
    std::vector<double> r(d.y.begin(), d.y.end());
    for (std::size_t j = 0; j < d.p; ++j) {
        const double t = theta[j];
        if (t == 0.0) continue;
        const auto col = d.column(j);
        for (std::size_t i = 0; i < d.n; ++i) r[i] -= t * col[i];
    }
    return r;
}

}  // namespace

InfluenceEvaluation influence_eval(const Dataset& d, const std::vector<double>& theta) {
    if (theta.size() != d.p)
        throw std::invalid_argument("influence_eval: theta length mismatch");
    InfluenceEvaluation ev;
    ev.n = d.n;
    ev.p = d.p;
    ev.theta_ref = theta;
    ev.sigma_hat = second_moment(d);
    const auto chol = cholesky(ev.sigma_hat, d.p);

    const auto r = residuals(d, theta);
    double s2 = 0.0;
    for (double v : r) s2 += v * v;
    ev.sigma2_hat = s2 / static_cast<double>(d.n);

    ev.eta.resize(d.n * d.p);
    std::vector<double> xi(d.p);
    for (std::size_t i = 0; i < d.n; ++i) {
        for (std::size_t j = 0; j < d.p; ++j) xi[j] = d.at(i, j);
        const auto solved = cholesky_solve(chol, d.p, xi);
        for (std::size_t j = 0; j < d.p; ++j) ev.eta[i * d.p + j] = solved[j] * r[i];
    }
    return ev;
}

std::vector<double> gaussian_score(const Dataset& d, const std::vector<double>& theta,
                                   double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("gaussian_score: sigma2 must be positive");
    const auto r = residuals(d, theta);
    std::vector<double> score(d.n * d.p);
    for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t j = 0; j < d.p; ++j) score[i * d.p + j] = d.at(i, j) * r[i] / sigma2;
    return score;
}

std::vector<double> one_step(const Dataset& d, const std::vector<double>& theta_start) {
    const auto ev = influence_eval(d, theta_start);
    std::vector<double> out(theta_start);
    for (std::size_t j = 0; j < d.p; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < d.n; ++i) mean += ev.eta_at(i, j);
        out[j] += mean / static_cast<double>(d.n);
    }
    return out;
}

std::vector<double> k_step(const Dataset& d, const std::vector<double>& theta_start,
                           std::size_t k) {
    if (k < 1) throw std::invalid_argument("k_step: k must be positive");
    std::vector<double> theta = theta_start;
    for (std::size_t step = 0; step < k; ++step) theta = one_step(d, theta);
    return theta;
}

std::vector<double> reduced_one_step(const Dataset& d, const SupportSet& support,
                                     const std::vector<double>& theta_start) {
    if (support.empty()) throw std::invalid_argument("reduced_one_step: empty support");
    if (theta_start.size() != d.p)
        throw std::invalid_argument("reduced_one_step: theta length mismatch");
    for (std::size_t k = 0; k < support.size(); ++k) {
        if (support[k] >= d.p)
            throw std::invalid_argument("reduced_one_step: support index out of range");
        if (k > 0 && support[k] <= support[k - 1])
            throw std::invalid_argument("reduced_one_step: support must be strictly ascending");
    }
    std::vector<bool> in_support(d.p, false);
    for (std::size_t j : support) in_support[j] = true;
    for (std::size_t j = 0; j < d.p; ++j)
        if (!in_support[j] && theta_start[j] != 0.0)
            throw std::invalid_argument("reduced_one_step: theta_start not supported on J");

    Dataset reduced;
    reduced.n = d.n;
    reduced.p = support.size();
    reduced.x.resize(d.n * support.size());
    reduced.y = d.y;
    std::vector<double> theta_reduced(support.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
        const auto col = d.column(support[k]);
        std::copy(col.begin(), col.end(), reduced.x.begin() + static_cast<std::ptrdiff_t>(k * d.n));
        reduced.column_names.push_back(d.column_names.empty() ? "" : d.column_names[support[k]]);
        theta_reduced[k] = theta_start[support[k]];
    }

    const auto fitted = one_step(reduced, theta_reduced);
    std::vector<double> out(d.p, 0.0);
    for (std::size_t k = 0; k < support.size(); ++k) out[support[k]] = fitted[k];
    return out;
}

std::vector<double> expected_one_step(const std::vector<double>& s1,
                                      const ColumnMeasure& nu) {
    if (s1.size() != nu.mass.size())
        throw std::invalid_argument("expected_one_step: length mismatch");
    std::vector<double> out(s1.size());
    for (std::size_t j = 0; j < s1.size(); ++j) out[j] = nu.mass[j] * s1[j];
    return out;
}

}  // namespace singboost
