#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "singboost/boosting.hpp"
#include "singboost/dataset.hpp"
#include "singboost/estimators.hpp"
#include "singboost/losses.hpp"
#include "singboost/measures.hpp"
#include "singboost/serialization.hpp"

namespace {

using namespace singboost;
using nlohmann::json;

std::string strip_extension(const std::string& path, const std::string& ext) {
    if (path.size() > ext.size() &&
        path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
        return path.substr(0, path.size() - ext.size());
    return path;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << j.dump(2) << '\n';
}

struct FitFlags {
    std::string data_path, target = "y", loss = "l2", out = "model.json";
    BoostConfig cfg;
    bool sing = false, ls = false, no_ls = false;
};

LinearModel run_fit(const Dataset& data, const LossSpec& loss, BoostConfig cfg,
                    bool use_sing, bool ls_mode) {
    cfg.target_loss = loss;
    cfg.ls_mode = ls_mode;
    if (use_sing) return fit_singboost(data, cfg);
    if (!loss.differentiable())
        throw std::invalid_argument("loss '" + loss.name() +
                                    "' has no gradient; rerun with --sing or --ls to use "
                                    "gradient-free singular iterations");
    if (loss.kind == LossKind::L2) return fit_l2boost(data, cfg);
    return fit_generic(data, cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SingBoost: componentwise boosting with gradient-free singular "
                 "iterations, column measures and one-step estimators"};
    app.require_subcommand(1);

    // simulate
    SyntheticSpec sim;
    std::string sim_out = "data.csv";
    auto* simulate = app.add_subcommand("simulate", "generate a Gaussian linear dataset");
    simulate->add_option("--n", sim.n, "observations")->default_val(100);
    simulate->add_option("--p", sim.p, "predictors")->default_val(50);
    simulate->add_option("--s0", sim.s0, "true nonzero coefficients")->default_val(10);
    simulate->add_option("--snr", sim.snr, "signal-to-noise ratio")->default_val(2.0);
    simulate->add_option("--seed", sim.seed, "random seed")->default_val(1);
    simulate->add_option("-o,--out", sim_out, "output CSV path")->default_val("data.csv");

    // fit
    FitFlags fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit a boosting model");
    fit_cmd->add_option("--data", fit.data_path, "input CSV")->required();
    fit_cmd->add_option("--target", fit.target, "response column")->default_val("y");
    fit_cmd->add_option("--loss", fit.loss,
                        "l2 | l1 | huber[:delta] | check[:tau] | hardrank")
        ->default_val("l2");
    fit_cmd->add_option("--kappa", fit.cfg.kappa, "step size")->default_val(0.1);
    fit_cmd->add_option("--miter", fit.cfg.m_iter, "iterations")->default_val(100);
    fit_cmd->add_option("--M", fit.cfg.M, "singular-step period")->default_val(5);
    fit_cmd->add_option("--seed", fit.cfg.seed, "seed recorded in the config")
        ->default_val(0);
    fit_cmd->add_flag("--sing", fit.sing, "use SingBoost");
    fit_cmd->add_flag("--ls", fit.ls,
                      "SingBoost with least-squares singular steps (implies --sing)");
    fit_cmd->add_flag("--no-ls", fit.no_ls,
                      "SingBoost with gradient singular steps (implies --sing)");
    fit_cmd->add_option("-o,--out", fit.out, "model JSON path")->default_val("model.json");

    // measure
    std::string ms_model, ms_data, ms_target = "y", ms_loss = "l2",
                ms_out = "measure.json", ms_mode = "frequency";
    BoostConfig ms_cfg;
    bool ms_sing = false, ms_ls = false, ms_bootstrap = false;
    std::size_t ms_b = 50, ms_subsample = 0;
    std::uint64_t ms_seed = 1;
    auto* measure = app.add_subcommand(
        "measure", "column measure from a fitted model or induced over subsamples");
    measure->add_option("--model", ms_model, "model JSON (trace measure)");
    measure->add_option("--data", ms_data, "input CSV (induced measure)");
    measure->add_option("--target", ms_target, "response column")->default_val("y");
    measure->add_option("--loss", ms_loss, "loss for the per-subsample fits")
        ->default_val("l2");
    measure->add_option("--kappa", ms_cfg.kappa)->default_val(0.1);
    measure->add_option("--miter", ms_cfg.m_iter)->default_val(100);
    measure->add_option("--M", ms_cfg.M)->default_val(5);
    measure->add_flag("--sing", ms_sing, "fit subsamples with SingBoost");
    measure->add_flag("--ls", ms_ls, "SingBoost least-squares singular steps");
    measure->add_option("--b", ms_b, "number of subsample draws")->default_val(50);
    measure->add_option("--subsample", ms_subsample, "rows per draw (0 = n/2)")
        ->default_val(0);
    measure->add_flag("--bootstrap", ms_bootstrap, "draw with replacement");
    measure->add_option("--mode", ms_mode, "frequency | indicator")
        ->default_val("frequency");
    measure->add_option("--seed", ms_seed, "seed for the subsample draws")->default_val(1);
    measure->add_option("-o,--out", ms_out, "measure JSON path")->default_val("measure.json");

    // singular-parts
    std::string sp_nu, sp_tilde, sp_out = "singular_parts.json";
    auto* parts = app.add_subcommand("singular-parts",
                                     "domination report of nu-tilde w.r.t. nu");
    parts->add_option("--nu", sp_nu, "reference measure JSON")->required();
    parts->add_option("--nu-tilde", sp_tilde, "target measure JSON")->required();
    parts->add_option("-o,--out", sp_out, "report JSON path")
        ->default_val("singular_parts.json");

    // reject-sample
    std::string rj_nu, rj_tilde, rj_out = "reject_report.json";
    std::size_t rj_draws = 20000;
    std::uint64_t rj_seed = 7;
    double rj_floor = 1e-3;
    auto* reject = app.add_subcommand("reject-sample",
                                      "draw columns from nu-tilde by rejection from nu");
    reject->add_option("--nu", rj_nu, "proposal measure JSON")->required();
    reject->add_option("--nu-tilde", rj_tilde, "target measure JSON")->required();
    reject->add_option("--draws", rj_draws, "accepted draws")->default_val(20000);
    reject->add_option("--seed", rj_seed, "random seed")->default_val(7);
    reject->add_option("--floor", rj_floor, "minimal singular-set mass")->default_val(1e-3);
    reject->add_option("-o,--out", rj_out, "report JSON path")
        ->default_val("reject_report.json");

    // paths
    std::string pt_model, pt_out = "paths.csv";
    auto* paths_cmd = app.add_subcommand("paths", "export coefficient paths");
    paths_cmd->add_option("--model", pt_model, "model JSON")->required();
    paths_cmd->add_option("-o,--out", pt_out, "paths CSV path")->default_val("paths.csv");

    // expected-onestep
    std::string eo_data, eo_target = "y", eo_measure, eo_out = "expected_onestep.json";
    std::size_t eo_k = 1;
    auto* eos = app.add_subcommand("expected-onestep",
                                   "k-step estimate shrunk by a column measure");
    eos->add_option("--data", eo_data, "input CSV")->required();
    eos->add_option("--target", eo_target, "response column")->default_val("y");
    eos->add_option("--measure", eo_measure, "column measure JSON")->required();
    eos->add_option("--k", eo_k, "number of one-step iterations")->default_val(1);
    eos->add_option("-o,--out", eo_out, "output JSON path")
        ->default_val("expected_onestep.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const SyntheticData data = simulate_gaussian_linear(sim);
            save_csv(data.data, sim_out);
            save_truth_json(data, strip_extension(sim_out, ".csv") + ".truth.json");
            return 0;
        }
        if (fit_cmd->parsed()) {
            const Dataset data = load_csv(fit.data_path, fit.target);
            const LossSpec loss = LossSpec::parse(fit.loss);
            const bool use_sing = fit.sing || fit.ls || fit.no_ls;
            const LinearModel model = run_fit(data, loss, fit.cfg, use_sing, !fit.no_ls);
            const std::string base = strip_extension(fit.out, ".json");
            save_model_json(model, fit.out);
            save_trace_csv(model.trace, base + ".trace.csv");
            save_corr_min_json(corr_min_report(model.trace), base + ".corrmin.json");
            return 0;
        }
        if (measure->parsed()) {
            MeasureMode mode = MeasureMode::Frequency;
            if (ms_mode == "indicator")
                mode = MeasureMode::Indicator;
            else if (ms_mode != "frequency")
                throw std::invalid_argument("measure: unknown mode '" + ms_mode + "'");
            ColumnMeasure result;
            if (!ms_model.empty()) {
                const LinearModel model = load_model_json(ms_model);
                result = column_measure_from_trace(model.trace, mode,
                                                   model.config.target_loss.name());
            } else if (!ms_data.empty()) {
                const Dataset data = load_csv(ms_data, ms_target);
                const LossSpec loss = LossSpec::parse(ms_loss);
                const bool use_sing = ms_sing || ms_ls;
                BoostConfig cfg = ms_cfg;
                const FitProcedure fit_proc = [&](const Dataset& sub) {
                    return run_fit(sub, loss, cfg, use_sing, true);
                };
                SubsampleOptions opts;
                opts.size = ms_subsample;
                opts.with_replacement = ms_bootstrap;
                result = induced_column_measure(data, uniform_row_measure(data.n), ms_b,
                                                fit_proc, mode, opts, ms_seed);
            } else {
                throw std::invalid_argument("measure: pass --model or --data");
            }
            save_measure_json(result, ms_out);
            return 0;
        }
        if (parts->parsed()) {
            const ColumnMeasure nu = load_measure_json(sp_nu);
            const ColumnMeasure nu_tilde = load_measure_json(sp_tilde);
            save_singular_part_json(singular_part(nu_tilde, nu), sp_out);
            return 0;
        }
        if (reject->parsed()) {
            if (rj_draws < 1)
                throw std::invalid_argument("reject-sample: --draws must be positive");
            const ColumnMeasure nu = load_measure_json(rj_nu);
            const ColumnMeasure nu_tilde = load_measure_json(rj_tilde);
            RejectState st = reject_init(nu, nu_tilde, rj_floor, rj_seed);
            std::vector<std::uint64_t> counts(nu.mass.size(), 0);
            for (std::size_t k = 0; k < rj_draws; ++k) ++counts[reject_next(st)];
            std::vector<double> freq(counts.size());
            for (std::size_t j = 0; j < counts.size(); ++j)
                freq[j] = static_cast<double>(counts[j]) / static_cast<double>(rj_draws);
            json report{{"draws", rj_draws},
                        {"counts", counts},
                        {"frequency", freq},
                        {"w_c", st.w_c},
                        {"w_s", st.w_s},
                        {"proposals", st.proposals},
                        {"acceptances", st.acceptances},
                        {"singular_draws", st.singular_draws},
                        {"active_set_resets", st.resets}};
            if (st.j_c.size() <= 16) {
                const auto law = rejection_implied_law(st);
                report["implied_law"] = law;
                report["tv_distance"] = total_variation(freq, law);
            }
            write_json_file(report, rj_out);
            return 0;
        }
        if (paths_cmd->parsed()) {
            save_paths_csv(load_model_json(pt_model), pt_out);
            return 0;
        }
        if (eos->parsed()) {
            const Dataset data = load_csv(eo_data, eo_target);
            const ColumnMeasure nu = load_measure_json(eo_measure);
            const std::vector<double> start(data.p, 0.0);
            const std::vector<double> s1 = k_step(data, start, eo_k);
            const std::vector<double> shrunk = expected_one_step(s1, nu);
            std::vector<std::size_t> support;
            for (std::size_t j = 0; j < nu.mass.size(); ++j)
                if (nu.mass[j] > 0.0) support.push_back(j + 1);
            json out{{"theta", shrunk}, {"support", support}, {"nu", nu.mass},
                     {"k_step", s1}, {"k", eo_k}};
            write_json_file(out, eo_out);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: invalid-argument: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: runtime: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
