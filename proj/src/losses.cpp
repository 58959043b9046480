#include "singboost/losses.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace singboost {

namespace {

void check_pair(std::span<const double> y, std::span<const double> yhat,
                std::size_t min_n) {
    if (y.size() != yhat.size())
        throw std::invalid_argument("loss: y and yhat length mismatch");
    if (y.size() < min_n)
        throw std::invalid_argument("loss: need at least " + std::to_string(min_n) +
                                    " observations");
}

double pointwise(const LossSpec& loss, double y, double f) {
    const double r = y - f;
    switch (loss.kind) {
        case LossKind::L2:
            return 0.5 * r * r;
        case LossKind::L1:
            return std::abs(r);
        case LossKind::Huber:
            return std::abs(r) <= loss.delta
                       ? 0.5 * r * r
                       : loss.delta * (std::abs(r) - 0.5 * loss.delta);
        case LossKind::Check:
            return r >= 0.0 ? loss.tau * r : (loss.tau - 1.0) * r;
        default:
            throw std::logic_error("pointwise: not a pointwise loss");
    }
}

// Counts pairs a < b (by position) with v[a] > v[b]; equal values are not
// inversions. Standard merge sort with a scratch buffer.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch,
                               std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t count = count_inversions(v, scratch, lo, mid) +
                          count_inversions(v, scratch, mid, hi);
    std::size_t a = lo, b = mid, out = lo;
    while (a < mid && b < hi) {
        if (v[a] <= v[b]) {
            scratch[out++] = v[a++];
        } else {
            count += mid - a;
            scratch[out++] = v[b++];
        }
    }
    while (a < mid) scratch[out++] = v[a++];
    while (b < hi) scratch[out++] = v[b++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return count;
}

}  // namespace

std::string LossSpec::name() const {
    char buf[48];
    switch (kind) {
        case LossKind::L2: return "l2";
        case LossKind::L1: return "l1";
        case LossKind::Huber:
            std::snprintf(buf, sizeof(buf), "huber:%g", delta);
            return buf;
        case LossKind::Check:
            std::snprintf(buf, sizeof(buf), "check:%g", tau);
            return buf;
        case LossKind::HardRank: return "hardrank";
    }
    return "?";
}

LossSpec LossSpec::huber(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("huber: delta must be positive");
    LossSpec s{LossKind::Huber};
    s.delta = delta;
    return s;
}

LossSpec LossSpec::check(double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("check: tau must lie in (0,1)");
    LossSpec s{LossKind::Check};
    s.tau = tau;
    return s;
}

LossSpec LossSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    double param = 0.0;
    bool has_param = false;
    if (colon != std::string::npos) {
        const char* first = text.data() + colon + 1;
        const char* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, param);
        if (ec != std::errc() || ptr != last)
            throw std::invalid_argument("loss: bad parameter in '" + text + "'");
        has_param = true;
    }
    if (head == "l2") return l2();
    if (head == "l1") return l1();
    if (head == "huber") return huber(has_param ? param : 1.345);
    if (head == "check") return check(has_param ? param : 0.5);
    if (head == "hardrank") return hard_rank();
    throw std::invalid_argument("loss: unknown loss '" + text + "'");
}

std::uint64_t hard_rank_discordant_naive(std::span<const double> y,
                                         std::span<const double> yhat) {
    check_pair(y, yhat, 2);
    const std::size_t n = y.size();
    std::uint64_t discordant = 0;  // unordered pairs
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if ((y[i] - y[j]) * (yhat[i] - yhat[j]) < 0.0) ++discordant;
    return 2 * discordant;  // ordered pairs i != j
}

std::uint64_t hard_rank_discordant_fast(std::span<const double> y,
                                        std::span<const double> yhat) {
    check_pair(y, yhat, 2);
    const std::size_t n = y.size();
    // Sorting tied-y groups by yhat makes within-group inversions vanish, so
    // the global inversion count is exactly the strict discordance count.
    // Packed pairs keep the sort cache-friendly.
    std::vector<std::pair<double, double>> pairs(n);
    for (std::size_t i = 0; i < n; ++i) pairs[i] = {y[i], yhat[i]};
    std::sort(pairs.begin(), pairs.end());
    std::vector<double> seq(n), scratch(n);
    for (std::size_t i = 0; i < n; ++i) seq[i] = pairs[i].second;
    return 2 * count_inversions(seq, scratch, 0, n);
}

double risk(const LossSpec& loss, std::span<const double> y, std::span<const double> yhat) {
    if (loss.kind == LossKind::HardRank) {
        const std::uint64_t d = hard_rank_discordant_naive(y, yhat);
        const auto n = static_cast<double>(y.size());
        return static_cast<double>(d) / (n * (n - 1.0));
    }
    check_pair(y, yhat, 1);
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) total += pointwise(loss, y[i], yhat[i]);
    return total / static_cast<double>(y.size());
}

double hard_rank_loss_fast(std::span<const double> y, std::span<const double> yhat) {
    const std::uint64_t d = hard_rank_discordant_fast(y, yhat);
    const auto n = static_cast<double>(y.size());
    return static_cast<double>(d) / (n * (n - 1.0));
}

std::vector<double> neg_gradient(const LossSpec& loss, std::span<const double> y,
                                 std::span<const double> f) {
    if (!loss.differentiable())
        throw std::invalid_argument("neg_gradient: loss has no gradient");
    check_pair(y, f, 1);
    std::vector<double> u(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - f[i];
        switch (loss.kind) {
            case LossKind::L2:
                u[i] = r;
                break;
            case LossKind::L1:
                u[i] = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
                break;
            case LossKind::Huber:
                u[i] = std::abs(r) <= loss.delta ? r
                                                 : loss.delta * (r > 0.0 ? 1.0 : -1.0);
                break;
            case LossKind::Check:
                u[i] = r > 0.0 ? loss.tau : (r < 0.0 ? loss.tau - 1.0 : 0.0);
                break;
            default:
                break;
        }
    }
    return u;
}

double offset_minimizer(const LossSpec& loss, std::span<const double> y) {
    if (y.empty()) throw std::invalid_argument("offset: empty response");
    switch (loss.kind) {
        case LossKind::L2: {
            double s = 0.0;
            for (double v : y) s += v;
            return s / static_cast<double>(y.size());
        }
        case LossKind::L1: {
            std::vector<double> sorted(y.begin(), y.end());
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            return n % 2 == 1 ? sorted[n / 2]
                              : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        }
        case LossKind::Check: {
            std::vector<double> sorted(y.begin(), y.end());
            std::sort(sorted.begin(), sorted.end());
            const double nt = static_cast<double>(sorted.size()) * loss.tau;
            // Lower endpoint of the tau-quantile minimizer interval.
            const double k = std::max(1.0, std::ceil(nt - 1e-12));
            const auto idx = std::min(static_cast<std::size_t>(k) - 1, sorted.size() - 1);
            return sorted[idx];
        }
        case LossKind::Huber: {
            std::vector<double> sorted(y.begin(), y.end());
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            double c = n % 2 == 1 ? sorted[n / 2]
                                  : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
            for (int iter = 0; iter < 100; ++iter) {
                double g = 0.0;
                std::size_t inside = 0;
                for (double v : y) {
                    const double r = v - c;
                    if (std::abs(r) <= loss.delta) {
                        g += r;
                        ++inside;
                    } else {
                        g += loss.delta * (r > 0.0 ? 1.0 : -1.0);
                    }
                }
                const double step = g / static_cast<double>(std::max<std::size_t>(inside, 1));
                c += step;
                if (std::abs(step) < 1e-13 * (1.0 + std::abs(c))) break;
            }
            return c;
        }
        case LossKind::HardRank:
            throw std::invalid_argument("offset: hard ranking loss has no offset minimizer");
    }
    throw std::logic_error("offset: unreachable");
}

}  // namespace singboost
