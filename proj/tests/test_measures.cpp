#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "singboost/boosting.hpp"
#include "singboost/dataset.hpp"
#include "singboost/measures.hpp"
#include "singboost/rng.hpp"
#include "singboost/serialization.hpp"

using namespace singboost;

namespace {

FitTrace make_trace(std::size_t p, std::size_t m_iter, const std::vector<long>& cols) {
    FitTrace trace;
    trace.p = p;
    trace.m_iter = m_iter;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        IterationRecord rec;
        rec.index = k + 1;
        rec.selected_column = cols[k];
        rec.coefficient_increment = 0.1;
        trace.iterations.push_back(rec);
    }
    return trace;
}

LinearModel fake_model(std::size_t p, const std::vector<long>& cols) {
    LinearModel m;
    m.beta.assign(p, 0.0);
    m.trace = make_trace(p, std::max<std::size_t>(cols.size(), 1), cols);
    return m;
}

ColumnMeasure measure(std::vector<double> mass) {
    return make_column_measure(std::move(mass), "test", MeasureMode::Frequency);
}

Dataset example_dataset(std::uint64_t seed, std::size_t n = 100) {
    SyntheticSpec spec;
    spec.n = n;
    spec.p = 50;
    spec.s0 = 10;
    spec.snr = 2.0;
    spec.seed = seed;
    return simulate_gaussian_linear(spec).data;
}

}  // namespace

TEST_CASE("column measure from a trace") {
    // Selections [3,1,3,3,1] in 1-based column numbers over five iterations.
    const FitTrace trace = make_trace(4, 5, {2, 0, 2, 2, 0});

    const ColumnMeasure freq = column_measure_from_trace(trace, MeasureMode::Frequency);
    CHECK(freq.mass == std::vector<double>{0.4, 0.0, 0.6, 0.0});

    const ColumnMeasure ind = column_measure_from_trace(trace, MeasureMode::Indicator);
    CHECK(ind.mass == std::vector<double>{1.0, 0.0, 1.0, 0.0});

    const FitTrace intercept_only = make_trace(3, 4, {-1, -1});
    const ColumnMeasure zero =
        column_measure_from_trace(intercept_only, MeasureMode::Frequency);
    CHECK(zero.mass == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("frequency mass sums to the selection share of the budget") {
    const Dataset d = example_dataset(5, 60);
    BoostConfig cfg;
    cfg.m_iter = 40;
    cfg.M = 5;
    cfg.target_loss = LossSpec::hard_rank();
    const LinearModel m = fit_singboost(d, cfg);
    const ColumnMeasure freq =
        column_measure_from_trace(m.trace, MeasureMode::Frequency);
    double total = 0.0;
    for (double v : freq.mass) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        total += v;
    }
    const double share = static_cast<double>(m.trace.iterations.size()) /
                         static_cast<double>(cfg.m_iter);
    CHECK(total == doctest::Approx(share).epsilon(1e-12));
}

TEST_CASE("induced measure with one full-size draw equals the full-data fit") {
    const Dataset d = example_dataset(7, 60);
    BoostConfig cfg;
    cfg.m_iter = 25;
    cfg.M = 1;
    const FitProcedure fit = [&](const Dataset& sub) { return fit_l2boost(sub, cfg); };
    SubsampleOptions opts;
    opts.size = d.n;
    const std::uint64_t seeds[] = {123};
    const ColumnMeasure induced = induced_column_measure(d, uniform_row_measure(d.n),
                                                         seeds, fit, MeasureMode::Frequency,
                                                         opts);
    const ColumnMeasure direct =
        column_measure_from_trace(fit_l2boost(d, cfg).trace, MeasureMode::Frequency);
    CHECK(induced.mass == direct.mass);
}

TEST_CASE("induced measure averages the per-draw measures") {
    const Dataset d = example_dataset(9, 40);
    // Stub fitter: alternates between a column-1 trace and a column-2 trace.
    std::size_t call = 0;
    const FitProcedure fit = [&](const Dataset& sub) {
        (void)sub;
        return fake_model(d.p, call++ % 2 == 0 ? std::vector<long>{0, 0}
                                               : std::vector<long>{1, 1});
    };
    const std::uint64_t seeds[] = {1, 2};
    const ColumnMeasure m = induced_column_measure(d, uniform_row_measure(d.n), seeds, fit,
                                                   MeasureMode::Indicator, {});
    CHECK(m.mass[0] == 0.5);
    CHECK(m.mass[1] == 0.5);
    for (std::size_t j = 2; j < d.p; ++j) CHECK(m.mass[j] == 0.0);
    CHECK(m.mode == MeasureMode::Frequency);
}

TEST_CASE("induced measure is invariant under permuting the draw seeds") {
    const Dataset d = example_dataset(11, 50);
    BoostConfig cfg;
    cfg.m_iter = 15;
    cfg.M = 1;
    const FitProcedure fit = [&](const Dataset& sub) { return fit_l2boost(sub, cfg); };
    const std::vector<std::uint64_t> a{11, 22, 33, 44};
    const std::vector<std::uint64_t> b{44, 11, 33, 22};
    const ColumnMeasure ma =
        induced_column_measure(d, uniform_row_measure(d.n), a, fit, MeasureMode::Indicator, {});
    const ColumnMeasure mb =
        induced_column_measure(d, uniform_row_measure(d.n), b, fit, MeasureMode::Indicator, {});
    REQUIRE(ma.mass.size() == mb.mass.size());
    for (std::size_t j = 0; j < ma.mass.size(); ++j)
        CHECK(ma.mass[j] == doctest::Approx(mb.mass[j]).epsilon(1e-12));
}

TEST_CASE("row measure gates which rows can be drawn") {
    const Dataset d = example_dataset(13, 30);
    std::vector<double> w(d.n, 0.0);
    std::set<double> allowed;
    for (std::size_t i = 0; i < 10; ++i) {
        w[i] = 1.0;
        allowed.insert(d.y[i]);
    }
    const RowMeasure zeta = make_row_measure(w);
    const FitProcedure fit = [&](const Dataset& sub) {
        for (double y : sub.y) CHECK(allowed.count(y) == 1);
        return fake_model(d.p, {0});
    };
    SubsampleOptions opts;
    opts.size = 5;
    const std::uint64_t seeds[] = {3, 4, 5};
    induced_column_measure(d, zeta, seeds, fit, MeasureMode::Indicator, opts);

    opts.size = 11;  // more than the charged rows
    CHECK_THROWS_AS(
        induced_column_measure(d, zeta, seeds, fit, MeasureMode::Indicator, opts),
        std::invalid_argument);
    opts.size = 1;
    CHECK_THROWS_WITH_AS(
        induced_column_measure(d, zeta, seeds, fit, MeasureMode::Indicator, opts),
        doctest::Contains("too small"), std::invalid_argument);
}

TEST_CASE("induced measure separates signal from noise on synthetic data") {
    SyntheticSpec spec;
    spec.n = 100;
    spec.p = 50;
    spec.s0 = 10;
    spec.snr = 2.0;
    spec.seed = 301;
    const SyntheticData s = simulate_gaussian_linear(spec);
    BoostConfig cfg;
    cfg.m_iter = 50;
    cfg.M = 1;
    const FitProcedure fit = [&](const Dataset& sub) { return fit_l2boost(sub, cfg); };
    const ColumnMeasure m = induced_column_measure(
        s.data, uniform_row_measure(s.data.n), 20, fit, MeasureMode::Indicator, {}, 900);
    double support_mean = 0.0, noise_mean = 0.0;
    std::size_t noise_count = 0;
    std::vector<bool> in_support(spec.p, false);
    for (std::size_t j : s.support) in_support[j] = true;
    for (std::size_t j = 0; j < spec.p; ++j) {
        if (in_support[j])
            support_mean += m.mass[j];
        else {
            noise_mean += m.mass[j];
            ++noise_count;
        }
    }
    support_mean /= static_cast<double>(s.support.size());
    noise_mean /= static_cast<double>(noise_count);
    CHECK(support_mean > noise_mean);
}

TEST_CASE("singular part report on the worked examples") {
    SUBCASE("one singular column") {
        const auto report = singular_part(measure({0.3, 0.4, 0.1}), measure({0.5, 0.0, 0.2}));
        CHECK(report.j_sing == std::vector<std::size_t>{1});
        CHECK_FALSE(report.dominated);
        CHECK(report.j_common == std::vector<std::size_t>{0, 2});
        CHECK(report.singular.mass == std::vector<double>{0.0, 0.4, 0.0});
        CHECK(report.absolutely_continuous.mass == std::vector<double>{0.3, 0.0, 0.1});
    }
    SUBCASE("equal measures are equivalent") {
        const auto nu = measure({0.5, 0.0, 0.2});
        CHECK(singular_part(nu, nu).dominated);
        CHECK(singular_part(nu, nu).j_sing.empty());
    }
    SUBCASE("support containment gives domination") {
        const auto report = singular_part(measure({0.0, 0.4, 0.0}), measure({0.5, 0.4, 0.2}));
        CHECK(report.dominated);
        CHECK(report.j_sing.empty());
    }
}

TEST_CASE("singular part properties on random measures") {
    Rng rng(71);
    auto random_measure = [&]() {
        std::vector<double> mass(6);
        for (auto& m : mass) m = rng.uniform01() < 0.4 ? 0.0 : rng.uniform01();
        return make_column_measure(mass, "rnd", MeasureMode::Frequency);
    };
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_measure(), b = random_measure(), c = random_measure();

        // A column singular for b w.r.t. a cannot be singular for a w.r.t. b.
        const auto ab = singular_part(b, a), ba = singular_part(a, b);
        for (std::size_t j : ab.j_sing)
            CHECK(std::find(ba.j_sing.begin(), ba.j_sing.end(), j) == ba.j_sing.end());

        // Equivalence is reflexive, symmetric, transitive.
        auto equivalent = [](const ColumnMeasure& u, const ColumnMeasure& v) {
            return singular_part(u, v).dominated && singular_part(v, u).dominated;
        };
        CHECK(equivalent(a, a));
        CHECK(equivalent(a, b) == equivalent(b, a));
        if (equivalent(a, b) && equivalent(b, c)) CHECK(equivalent(a, c));

        // The Lebesgue parts rebuild the measure exactly.
        for (std::size_t j = 0; j < b.mass.size(); ++j)
            CHECK(ab.absolutely_continuous.mass[j] + ab.singular.mass[j] == b.mass[j]);
    }
}

TEST_CASE("reject_init sets up the masses") {
    SUBCASE("half the columns charged") {
        const auto st = reject_init(measure({0.5, 0.3, 0.0, 0.0}),
                                    measure({0.2, 0.2, 0.3, 0.1}), 1e-3, 1);
        CHECK(st.j_c == std::vector<std::size_t>{0, 1});
        CHECK(st.j_s == std::vector<std::size_t>{2, 3});
        CHECK(st.w_c == 0.5);
        CHECK(st.w_s == 0.5);
        CHECK(st.big_w_s == doctest::Approx(0.4));
        CHECK(st.h_bound == doctest::Approx(0.2 / 0.3));
    }
    SUBCASE("flooring on the singular set") {
        const auto st = reject_init(measure({0.5, 0.0}), measure({0.2, 0.0}), 1e-3, 1);
        CHECK(st.nu_tilde.mass[1] == 1e-3);
        CHECK(st.big_w_s == doctest::Approx(1e-3));
        CHECK(st.nu_tilde.mass[0] == 0.2);  // no flooring on the common set
    }
    SUBCASE("empty singular set disables the singular branch") {
        const auto st = reject_init(measure({0.5, 0.3}), measure({0.2, 0.2}), 1e-3, 1);
        CHECK(st.w_s == 0.0);
        CHECK(st.j_s.empty());
    }
    SUBCASE("proportional measures accept every proposal") {
        const auto st = reject_init(measure({0.6, 0.3, 0.1}), measure({0.3, 0.15, 0.05}),
                                    1e-3, 1);
        for (std::size_t j : st.j_c) {
            const double h = st.nu_tilde.mass[j] / (st.h_bound * st.nu_l.mass[j]);
            CHECK(h == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("identically zero target is rejected") {
        CHECK_THROWS_AS(reject_init(measure({0.5, 0.5}), measure({0.0, 0.0}), 0.0, 1),
                        std::invalid_argument);
    }
    SUBCASE("normalizing by h_bound caps the acceptance ratios at one") {
        Rng rng(87);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> nu(5), tilde(5);
            for (std::size_t j = 0; j < 5; ++j) {
                nu[j] = rng.uniform01() < 0.3 ? 0.0 : rng.uniform01();
                tilde[j] = rng.uniform01();
            }
            if (std::all_of(nu.begin(), nu.end(), [](double v) { return v == 0.0; }))
                nu[0] = 0.5;
            const auto st = reject_init(measure(nu), measure(tilde), 1e-3, 1);
            double max_h = 0.0;
            for (std::size_t j : st.j_c)
                max_h = std::max(max_h, st.nu_tilde.mass[j] / (st.h_bound * st.nu_l.mass[j]));
            CHECK(max_h == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("rejection sampler matches the exact chain law") {
    // Hand computation for nu = [0.6, 0.3, 0], nu~ = [0.2, 0.4, 0.4]:
    // w_c = 2/3, acceptance 1/4 on column 1 and 1 on column 2. Solving the
    // active-set chain gives draw probabilities (1/9, 4/9, 4/9).
    auto st = reject_init(measure({0.6, 0.3, 0.0}), measure({0.2, 0.4, 0.4}), 1e-3, 7);

    const auto law = rejection_implied_law(st);
    CHECK(law[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(law[1] == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(law[2] == doctest::Approx(4.0 / 9.0).epsilon(1e-12));

    const std::size_t draws = 20000;
    std::vector<double> freq(3, 0.0);
    for (std::size_t k = 0; k < draws; ++k) freq[reject_next(st)] += 1.0;
    for (double& f : freq) f /= static_cast<double>(draws);
    CHECK(total_variation(freq, law) <= 0.02);

    // Branch-(b) emissions are exactly the common-set draws; conditioned on
    // them the chain law puts (1/5, 4/5) on columns 1 and 2.
    const double common = freq[0] + freq[1];
    CHECK(freq[0] / common == doctest::Approx(0.2).epsilon(0.15));
    CHECK(freq[1] / common == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("rejection sampler degenerate branches") {
    SUBCASE("empty common set draws straight from the singular weights") {
        auto st = reject_init(measure({0.0, 0.0, 0.0}), measure({0.2, 0.3, 0.5}), 1e-3, 11);
        CHECK(st.w_s == 1.0);
        const auto law = rejection_implied_law(st);
        CHECK(law[0] == doctest::Approx(0.2));
        CHECK(law[1] == doctest::Approx(0.3));
        CHECK(law[2] == doctest::Approx(0.5));
        std::vector<double> freq(3, 0.0);
        for (std::size_t k = 0; k < 20000; ++k) freq[reject_next(st)] += 1.0;
        for (double& f : freq) f /= 20000.0;
        CHECK(total_variation(freq, law) <= 0.02);
        CHECK(st.proposals == 0);
    }
    SUBCASE("proportional measures reproduce the proposal law") {
        auto st = reject_init(measure({0.6, 0.3, 0.1}), measure({0.3, 0.15, 0.05}), 1e-3, 13);
        const auto law = rejection_implied_law(st);
        CHECK(law[0] == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(law[1] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(law[2] == doctest::Approx(0.1).epsilon(1e-12));
        std::vector<double> freq(3, 0.0);
        for (std::size_t k = 0; k < 20000; ++k) freq[reject_next(st)] += 1.0;
        for (double& f : freq) f /= 20000.0;
        CHECK(total_variation(freq, law) <= 0.02);
        CHECK(st.acceptances == st.proposals);  // acceptance rate one
    }
    SUBCASE("zero target mass on the common set forces resets") {
        auto st = reject_init(measure({0.5, 0.0}), measure({0.0, 0.4}), 1e-3, 17);
        CHECK(st.h_bound == 0.0);
        const auto law = rejection_implied_law(st);
        CHECK(law[0] == doctest::Approx(0.0));
        CHECK(law[1] == doctest::Approx(1.0));
        for (std::size_t k = 0; k < 200; ++k) CHECK(reject_next(st) == 1);
        CHECK(st.resets > 0);
    }
}

TEST_CASE("measure serialization round trip") {
    const ColumnMeasure m = make_column_measure({0.25, 0.0, 1.0}, "hardrank",
                                                MeasureMode::Frequency);
    const ColumnMeasure back = measure_from_json(measure_to_json(m));
    CHECK(back.mass == m.mass);
    CHECK(back.origin_loss == m.origin_loss);
    CHECK(back.mode == m.mode);

    CHECK_THROWS_AS(make_column_measure({0.5, 1.5}, "x", MeasureMode::Frequency),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_column_measure({0.5, 0.5}, "x", MeasureMode::Indicator),
                    std::invalid_argument);
}

TEST_CASE("row measure validation") {
    CHECK_THROWS_AS(make_row_measure({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_row_measure({0.5, 1.2}), std::invalid_argument);
    CHECK(uniform_row_measure(3).weight == std::vector<double>{1.0, 1.0, 1.0});
}
