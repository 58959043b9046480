#include "singboost/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace singboost {

namespace {

void check_mass(const std::vector<double>& mass) {
    if (mass.empty()) throw std::invalid_argument("column measure: empty mass vector");
    for (double m : mass)
        if (!(m >= 0.0 && m <= 1.0))
            throw std::invalid_argument("column measure: mass entries must lie in [0,1]");
}

}  // namespace

ColumnMeasure make_column_measure(std::vector<double> mass, std::string origin_loss,
                                  MeasureMode mode) {
    check_mass(mass);
    if (mode == MeasureMode::Indicator)
        for (double m : mass)
            if (m != 0.0 && m != 1.0)
                throw std::invalid_argument("column measure: indicator mass must be 0 or 1");
    return {std::move(mass), std::move(origin_loss), mode};
}

RowMeasure make_row_measure(std::vector<double> weight) {
    if (weight.empty()) throw std::invalid_argument("row measure: empty weight vector");
    bool any = false;
    for (double w : weight) {
        if (!(w >= 0.0 && w <= 1.0))
            throw std::invalid_argument("row measure: weights must lie in [0,1]");
        any = any || w > 0.0;
    }
    if (!any) throw std::invalid_argument("row measure: all weights are zero");
    return {std::move(weight)};
}

RowMeasure uniform_row_measure(std::size_t n) {
    return {std::vector<double>(n, 1.0)};
}

ColumnMeasure column_measure_from_trace(const FitTrace& trace, MeasureMode mode,
                                        std::string origin_loss) {
    if (trace.p == 0 || trace.m_iter == 0)
        throw std::invalid_argument("column measure: empty trace");
    std::vector<double> mass(trace.p, 0.0);
    for (const auto& rec : trace.iterations) {
        if (rec.selected_column < 0) continue;
        mass[static_cast<std::size_t>(rec.selected_column)] += 1.0;
    }
    if (mode == MeasureMode::Frequency) {
        for (double& m : mass) m /= static_cast<double>(trace.m_iter);
    } else {
        for (double& m : mass) m = m > 0.0 ? 1.0 : 0.0;
    }
    return {std::move(mass), std::move(origin_loss), mode};
}

namespace {

std::vector<std::size_t> draw_rows(const RowMeasure& zeta, std::size_t size,
                                   bool with_replacement, Rng& rng) {
    std::vector<std::size_t> rows;
    rows.reserve(size);
    if (with_replacement) {
        for (std::size_t k = 0; k < size; ++k)
            rows.push_back(rng.weighted_index(zeta.weight));
    } else {
        std::vector<double> remaining = zeta.weight;
        std::size_t positive = 0;
        for (double w : remaining)
            if (w > 0.0) ++positive;
        if (positive < size)
            throw std::invalid_argument(
                "induced measure: row measure charges fewer rows than the subsample size");
        for (std::size_t k = 0; k < size; ++k) {
            const std::size_t i = rng.weighted_index(remaining);
            rows.push_back(i);
            remaining[i] = 0.0;
        }
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

Dataset take_rows(const Dataset& d, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.n = rows.size();
    out.p = d.p;
    out.x.resize(out.n * out.p);
    out.y.resize(out.n);
    out.column_names = d.column_names;
    for (std::size_t j = 0; j < d.p; ++j) {
        const auto col = d.column(j);
        for (std::size_t i = 0; i < rows.size(); ++i) out.x[j * out.n + i] = col[rows[i]];
    }
    for (std::size_t i = 0; i < rows.size(); ++i) out.y[i] = d.y[rows[i]];
    return out;
}

}  // namespace

ColumnMeasure induced_column_measure(const Dataset& d, const RowMeasure& zeta,
                                     std::span<const std::uint64_t> draw_seeds,
                                     const FitProcedure& fit, MeasureMode mode,
                                     const SubsampleOptions& opts) {
    if (draw_seeds.empty())
        throw std::invalid_argument("induced measure: need at least one draw");
    if (zeta.weight.size() != d.n)
        throw std::invalid_argument("induced measure: row measure length mismatch");
    std::size_t size = opts.size;
    if (size == 0) size = opts.with_replacement ? d.n : d.n / 2;
    if (size < 2) throw std::invalid_argument("induced measure: subsample too small to fit");
    if (size > d.n)
        throw std::invalid_argument("induced measure: subsample size exceeds the row count");

    std::vector<double> mean(d.p, 0.0);
    std::string origin;
    for (const std::uint64_t seed : draw_seeds) {
        Rng rng(seed);
        const auto rows = draw_rows(zeta, size, opts.with_replacement, rng);
        const LinearModel model = fit(take_rows(d, rows));
        if (origin.empty()) origin = model.config.target_loss.name();
        const ColumnMeasure part = column_measure_from_trace(model.trace, mode, origin);
        if (part.mass.size() != d.p)
            throw std::invalid_argument("induced measure: fit changed the column count");
        for (std::size_t j = 0; j < d.p; ++j) mean[j] += part.mass[j];
    }
    const auto b = static_cast<double>(draw_seeds.size());
    for (double& m : mean) m /= b;
    // The average of indicator measures is frequency-valued.
    return {std::move(mean), std::move(origin), MeasureMode::Frequency};
}

ColumnMeasure induced_column_measure(const Dataset& d, const RowMeasure& zeta,
                                     std::size_t b, const FitProcedure& fit,
                                     MeasureMode mode, const SubsampleOptions& opts,
                                     std::uint64_t seed) {
    if (b < 1) throw std::invalid_argument("induced measure: b must be positive");
    std::vector<std::uint64_t> seeds(b);
    for (std::size_t i = 0; i < b; ++i) seeds[i] = seed + i;
    return induced_column_measure(d, zeta, seeds, fit, mode, opts);
}

SingularPartReport singular_part(const ColumnMeasure& nu_tilde, const ColumnMeasure& nu) {
    if (nu_tilde.mass.size() != nu.mass.size())
        throw std::invalid_argument("singular_part: measures have different lengths");
    const std::size_t p = nu.mass.size();
    SingularPartReport report;
    std::vector<double> ac(p, 0.0), sing(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        const bool in_nu = nu.mass[j] > 0.0;
        const bool in_tilde = nu_tilde.mass[j] > 0.0;
        if (!in_nu && in_tilde) {
            report.j_sing.push_back(j);
            sing[j] = nu_tilde.mass[j];
        } else {
            if (in_nu && in_tilde) report.j_common.push_back(j);
            ac[j] = nu_tilde.mass[j];
        }
    }
    report.dominated = report.j_sing.empty();
    report.absolutely_continuous = {std::move(ac), nu_tilde.origin_loss, nu_tilde.mode};
    report.singular = {std::move(sing), nu_tilde.origin_loss, nu_tilde.mode};
    return report;
}

RejectState reject_init(const ColumnMeasure& nu_l, const ColumnMeasure& nu_tilde,
                        double epsilon_floor, std::uint64_t seed) {
    if (nu_l.mass.size() != nu_tilde.mass.size())
        throw std::invalid_argument("reject_init: measures have different lengths");
    if (!(epsilon_floor >= 0.0 && epsilon_floor <= 1.0))
        throw std::invalid_argument("reject_init: epsilon_floor must lie in [0,1]");
    check_mass(nu_l.mass);
    check_mass(nu_tilde.mass);
    bool tilde_positive = false;
    for (double m : nu_tilde.mass) tilde_positive = tilde_positive || m > 0.0;
    if (!tilde_positive)
        throw std::invalid_argument("reject_init: nu_tilde is identically zero");

    RejectState st;
    st.nu_l = nu_l;
    st.nu_tilde = nu_tilde;
    const std::size_t p = nu_l.mass.size();
    for (std::size_t j = 0; j < p; ++j) {
        if (nu_l.mass[j] > 0.0)
            st.j_c.push_back(j);
        else
            st.j_s.push_back(j);
    }
    st.w_c = static_cast<double>(st.j_c.size()) / static_cast<double>(p);
    st.w_s = 1.0 - st.w_c;
    for (std::size_t j : st.j_s) {
        st.nu_tilde.mass[j] = std::max(st.nu_tilde.mass[j], epsilon_floor);
        st.big_w_s += st.nu_tilde.mass[j];
    }
    if (!st.j_s.empty() && !(st.big_w_s > 0.0))
        throw std::invalid_argument(
            "reject_init: nu_tilde must put positive mass on the singular candidates "
            "(set epsilon_floor > 0)");
    st.h_bound = 0.0;
    for (std::size_t j : st.j_c)
        st.h_bound = std::max(st.h_bound, st.nu_tilde.mass[j] / st.nu_l.mass[j]);
    st.active.assign(p, true);
    st.rng_seed = seed;
    st.rng = Rng(seed);
    return st;
}

std::size_t reject_next(RejectState& st) {
    const std::size_t p = st.nu_l.mass.size();
    std::vector<double> weights(p);
    while (true) {
        const bool common_branch = st.rng.uniform01() < st.w_c;
        if (!common_branch) {
            // Singular branch: draw straight from nu_tilde over j_s.
            std::fill(weights.begin(), weights.end(), 0.0);
            for (std::size_t j : st.j_s) weights[j] = st.nu_tilde.mass[j];
            const std::size_t j = st.rng.weighted_index(weights);
            st.active.assign(p, true);
            ++st.singular_draws;
            return j;
        }
        std::fill(weights.begin(), weights.end(), 0.0);
        double total = 0.0;
        for (std::size_t j : st.j_c) {
            if (!st.active[j]) continue;
            weights[j] = st.nu_l.mass[j];
            total += weights[j];
        }
        if (!(total > 0.0)) {
            // Every proposal candidate was rejected; start over.
            st.active.assign(p, true);
            ++st.resets;
            continue;
        }
        const std::size_t j0 = st.rng.weighted_index(weights);
        ++st.proposals;
        const double h = st.h_bound > 0.0
                             ? st.nu_tilde.mass[j0] / (st.h_bound * st.nu_l.mass[j0])
                             : 0.0;
        if (st.rng.uniform01() < h) {
            st.active.assign(p, true);
            ++st.acceptances;
            return j0;
        }
        st.active[j0] = false;
    }
}

std::vector<double> rejection_implied_law(const RejectState& st, std::size_t max_common) {
    const std::size_t p = st.nu_l.mass.size();
    const std::size_t m = st.j_c.size();
    if (m > max_common)
        throw std::invalid_argument("rejection_implied_law: common set too large");

    std::vector<double> s_emit(p, 0.0);  // singular-branch emission probabilities
    if (st.w_s > 0.0)
        for (std::size_t j : st.j_s) s_emit[j] = st.w_s * st.nu_tilde.mass[j] / st.big_w_s;

    std::vector<double> h(m), prop(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t j = st.j_c[k];
        prop[k] = st.nu_l.mass[j];
        h[k] = st.h_bound > 0.0 ? st.nu_tilde.mass[j] / (st.h_bound * st.nu_l.mass[j]) : 0.0;
    }

    // For every active subset A of j_c: emit[k] = P(column j_c[k] accepted
    // before the chain resets), sing_scale = expected singular-branch
    // emission multiplier, reset = P(reset before any emission).
    const std::size_t states = std::size_t{1} << m;
    std::vector<std::vector<double>> emit(states);
    std::vector<double> sing_scale(states, 0.0), reset(states, 0.0);
    for (std::size_t a = 0; a < states; ++a) {
        emit[a].assign(m, 0.0);
        double total = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            if (a & (std::size_t{1} << k)) total += prop[k];
        if (!(total > 0.0)) {
            sing_scale[a] = 1.0;
            reset[a] = st.w_c;
            continue;
        }
        sing_scale[a] = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (!(a & (std::size_t{1} << k))) continue;
            const double pk = st.w_c * prop[k] / total;
            const std::size_t next = a & ~(std::size_t{1} << k);
            emit[a][k] += pk * h[k];
            for (std::size_t q = 0; q < m; ++q) emit[a][q] += pk * (1.0 - h[k]) * emit[next][q];
            sing_scale[a] += pk * (1.0 - h[k]) * sing_scale[next];
            reset[a] += pk * (1.0 - h[k]) * reset[next];
        }
    }

    const std::size_t full = states - 1;
    const double renorm = 1.0 - reset[full];
    if (!(renorm > 0.0))
        throw std::runtime_error("rejection_implied_law: sampler never accepts");
    std::vector<double> law(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) law[j] = s_emit[j] * sing_scale[full] / renorm;
    for (std::size_t k = 0; k < m; ++k) law[st.j_c[k]] += emit[full][k] / renorm;
    return law;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("total_variation: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

}  // namespace singboost
