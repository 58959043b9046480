#include "singboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <thread>

namespace singboost {

namespace {

constexpr double kCorrelationFloor = 1e-12;

void validate_config(const BoostConfig& cfg) {
    if (!(cfg.kappa > 0.0 && cfg.kappa <= 1.0))
        throw std::invalid_argument("boost: kappa must lie in (0,1]");
    if (cfg.m_iter < 1) throw std::invalid_argument("boost: m_iter must be positive");
    if (cfg.M < 1) throw std::invalid_argument("boost: M must be positive");
}

// Runs fn(j) for j in [0, p), chunked over the thread budget. Each call only
// writes its own slot, so the result is schedule-independent.
void for_each_column(std::size_t p, const std::function<void(std::size_t)>& fn) {
    const unsigned threads = thread_budget();
    if (threads <= 1 || p < 16) {
        for (std::size_t j = 0; j < p; ++j) fn(j);
        return;
    }
    const unsigned used = std::min<unsigned>(threads, static_cast<unsigned>(p));
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (unsigned t = 0; t < used; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t j = t; j < p; j += used) fn(j);
        });
    }
    for (auto& th : pool) th.join();
}

// Working state of one boosting run on standardized data. Columns there have
// mean 0 and <x_j, x_j>/n == 1, so the simple least-squares slope on any
// vector v is just <x_j, v>/n and the simple-fit intercept is mean(v).
struct Engine {
    const Dataset& data;  // standardized
    const BoostConfig& cfg;
    std::vector<double> fhat;      // current predictions of the centered response
    std::vector<double> residual;  // y - fhat
    std::vector<double> beta;      // kept-space coefficients
    double intercept = 0.0;
    FitTrace trace;

    Engine(const Dataset& d, const BoostConfig& c, std::size_t original_p, double offset)
        : data(d), cfg(c), fhat(d.n, offset), residual(d.n), beta(d.p, 0.0),
          intercept(offset) {
        trace.p = original_p;
        trace.m_iter = c.m_iter;
        trace.initial_offset = offset;
        refresh_residual();
    }

    void refresh_residual() {
        for (std::size_t i = 0; i < data.n; ++i) residual[i] = data.y[i] - fhat[i];
    }

    // <x_j, v>/n for every column.
    std::vector<double> slopes_on(const std::vector<double>& v) const {
        std::vector<double> c(data.p);
        const auto n = static_cast<double>(data.n);
        for_each_column(data.p, [&](std::size_t j) {
            const auto col = data.column(j);
            double s = 0.0;
            for (std::size_t i = 0; i < data.n; ++i) s += col[i] * v[i];
            c[j] = s / n;
        });
        return c;
    }

    static std::size_t argmax_abs(const std::vector<double>& v) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < v.size(); ++j)
            if (std::abs(v[j]) > std::abs(v[best])) best = j;
        return best;
    }

    void apply_update(std::size_t j, double coef_inc, double intercept_inc) {
        beta[j] += coef_inc;
        intercept += intercept_inc;
        const auto col = data.column(j);
        for (std::size_t i = 0; i < data.n; ++i) {
            fhat[i] += intercept_inc + coef_inc * col[i];
            residual[i] = data.y[i] - fhat[i];
        }
    }

    void record(std::size_t iter, long original_column, double coef_inc,
                double intercept_inc, bool singular, std::optional<double> ratio) {
        IterationRecord rec;
        rec.index = iter;
        rec.selected_column = original_column;
        rec.coefficient_increment = coef_inc;
        rec.intercept_increment = intercept_inc;
        rec.training_risk_l2 = risk(LossSpec::l2(), data.y, fhat);
        rec.training_risk_target = cfg.target_loss.kind == LossKind::HardRank
                                       ? hard_rank_loss_fast(data.y, fhat)
                                       : risk(cfg.target_loss, data.y, fhat);
        rec.is_singular = singular;
        rec.corr_ratio = ratio;
        trace.iterations.push_back(std::move(rec));
    }

    // One componentwise least-squares iteration. Returns false on early stop.
    bool l2_step(std::size_t iter, const std::vector<std::size_t>& kept) {
        const auto c = slopes_on(residual);
        const std::size_t j = argmax_abs(c);
        if (std::abs(c[j]) < kCorrelationFloor) {
            trace.stopped_at = iter;
            return false;
        }
        const double inc = cfg.kappa * c[j];
        apply_update(j, inc, 0.0);
        record(iter, static_cast<long>(kept[j]), inc, 0.0, false, std::nullopt);
        return true;
    }

    // One gradient step w.r.t. the target loss (requires differentiability).
    bool gradient_step(std::size_t iter, const std::vector<std::size_t>& kept,
                       bool singular) {
        const auto u = neg_gradient(cfg.target_loss, data.y, fhat);
        double u_mean = 0.0;
        for (double v : u) u_mean += v;
        u_mean /= static_cast<double>(data.n);
        const auto g = slopes_on(u);
        const std::size_t j = argmax_abs(g);
        if (std::abs(g[j]) < kCorrelationFloor) {
            trace.stopped_at = iter;
            return false;
        }
        std::optional<double> ratio;
        if (singular) {
            const auto c = slopes_on(residual);
            const double best = std::abs(c[argmax_abs(c)]);
            ratio = best > 0.0 ? std::abs(c[j]) / best : 0.0;
        }
        apply_update(j, cfg.kappa * g[j], cfg.kappa * u_mean);
        record(iter, static_cast<long>(kept[j]), cfg.kappa * g[j], cfg.kappa * u_mean,
               singular, ratio);
        return true;
    }

    // Singular iteration with least-squares baselearners: every column's
    // simple fit is advanced by kappa and scored directly in the target loss;
    // the argmin wins, ties to the lowest index.
    bool secant_step(std::size_t iter, const std::vector<std::size_t>& kept) {
        const auto c = slopes_on(residual);
        const std::size_t best_corr = argmax_abs(c);
        if (std::abs(c[best_corr]) < kCorrelationFloor) {
            trace.stopped_at = iter;
            return false;
        }
        std::vector<double> score(data.p);
        const bool rank = cfg.target_loss.kind == LossKind::HardRank;
        for_each_column(data.p, [&](std::size_t j) {
            std::vector<double> candidate(data.n);
            const auto col = data.column(j);
            const double step = cfg.kappa * c[j];
            for (std::size_t i = 0; i < data.n; ++i)
                candidate[i] = fhat[i] + step * col[i];
            score[j] = rank ? hard_rank_loss_fast(data.y, candidate)
                            : risk(cfg.target_loss, data.y, candidate);
        });
        std::size_t j = 0;
        for (std::size_t k = 1; k < score.size(); ++k)
            if (score[k] < score[j]) j = k;
        const double ratio = std::abs(c[j]) / std::abs(c[best_corr]);
        const double inc = cfg.kappa * c[j];
        apply_update(j, inc, 0.0);
        record(iter, static_cast<long>(kept[j]), inc, 0.0, true, ratio);
        return true;
    }
};

LinearModel finalize(Engine&& eng, const Standardization& t, const BoostConfig& cfg,
                     std::string fitter) {
    LinearModel m;
    m.beta.assign(t.original_p(), 0.0);
    double shift = 0.0;
    for (std::size_t k = 0; k < t.kept.size(); ++k) {
        const std::size_t j = t.kept[k];
        m.beta[j] = eng.beta[k] / t.sds[j];
        shift += m.beta[j] * t.means[j];
    }
    m.intercept = t.y_mean + eng.intercept - shift;
    m.trace = std::move(eng.trace);
    m.standardization = t;
    m.config = cfg;
    m.fitter = std::move(fitter);
    return m;
}

}  // namespace

unsigned thread_budget() {
    static const unsigned cached = [] {
        if (const char* env = std::getenv("SINGBOOST_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1) return static_cast<unsigned>(v);
        }
        return 1u;
    }();
    return cached;
}

std::vector<double> predict(const LinearModel& model, const Dataset& d) {
    if (d.p != model.beta.size())
        throw std::invalid_argument("predict: column count mismatch");
    std::vector<double> out(d.n, model.intercept);
    for (std::size_t j = 0; j < d.p; ++j) {
        const double b = model.beta[j];
        if (b == 0.0) continue;
        const auto col = d.column(j);
        for (std::size_t i = 0; i < d.n; ++i) out[i] += b * col[i];
    }
    return out;
}

LinearModel fit_l2boost(const Dataset& d, const BoostConfig& cfg) {
    validate_config(cfg);
    auto std_result = standardize(d);
    const double offset = offset_minimizer(LossSpec::l2(), std_result.data.y);
    Engine eng(std_result.data, cfg, d.p, offset);
    for (std::size_t k = 1; k <= cfg.m_iter; ++k)
        if (!eng.l2_step(k, std_result.transform.kept)) break;
    return finalize(std::move(eng), std_result.transform, cfg, "l2boost");
}

LinearModel fit_generic(const Dataset& d, const BoostConfig& cfg) {
    validate_config(cfg);
    if (!cfg.target_loss.differentiable())
        throw std::invalid_argument(
            "fit_generic: target loss has no gradient; use fit_singboost");
    auto std_result = standardize(d);
    const double offset = offset_minimizer(cfg.target_loss, std_result.data.y);
    Engine eng(std_result.data, cfg, d.p, offset);
    for (std::size_t k = 1; k <= cfg.m_iter; ++k)
        if (!eng.gradient_step(k, std_result.transform.kept, false)) break;
    return finalize(std::move(eng), std_result.transform, cfg, "generic");
}

LinearModel fit_singboost(const Dataset& d, const BoostConfig& cfg) {
    validate_config(cfg);
    if (cfg.M > cfg.m_iter)
        throw std::invalid_argument("fit_singboost: M must not exceed m_iter");
    if (!cfg.ls_mode && !cfg.target_loss.differentiable())
        throw std::invalid_argument(
            "fit_singboost: ls_mode=false needs a differentiable target loss");
    auto std_result = standardize(d);
    // The singular steps act on least-squares residuals, so the offset is the
    // plain mean even when the target loss is something else.
    const double offset = offset_minimizer(LossSpec::l2(), std_result.data.y);
    Engine eng(std_result.data, cfg, d.p, offset);
    const std::size_t runs = cfg.m_iter / cfg.M;
    bool alive = true;
    for (std::size_t r = 0; r < runs && alive; ++r) {
        const std::size_t base = r * cfg.M;
        alive = cfg.ls_mode ? eng.secant_step(base + 1, std_result.transform.kept)
                            : eng.gradient_step(base + 1, std_result.transform.kept, true);
        for (std::size_t t = 2; t <= cfg.M && alive; ++t)
            alive = eng.l2_step(base + t, std_result.transform.kept);
    }
    return finalize(std::move(eng), std_result.transform, cfg, "singboost");
}

CorrMinReport corr_min_report(const FitTrace& trace) {
    CorrMinReport report;
    for (const auto& rec : trace.iterations) {
        if (!rec.is_singular || !rec.corr_ratio) continue;
        report.iteration.push_back(rec.index);
        report.ratio.push_back(*rec.corr_ratio);
    }
    if (!report.ratio.empty())
        report.min_ratio = *std::min_element(report.ratio.begin(), report.ratio.end());
    return report;
}

std::vector<std::vector<double>> coefficient_paths(const LinearModel& model) {
    const FitTrace& trace = model.trace;
    std::vector<std::vector<double>> path;
    path.reserve(trace.iterations.size() + 1);
    std::vector<double> row(trace.p + 1, 0.0);
    row[0] = trace.initial_offset;
    path.push_back(row);
    for (const auto& rec : trace.iterations) {
        row[0] += rec.intercept_increment;
        if (rec.selected_column >= 0)
            row[1 + static_cast<std::size_t>(rec.selected_column)] +=
                rec.coefficient_increment;
        path.push_back(row);
    }
    return path;
}

}  // namespace singboost
