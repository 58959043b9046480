#include "singboost/serialization.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace singboost {

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json config_to_json(const BoostConfig& cfg) {
    return json{{"loss", cfg.target_loss.name()},
                {"kappa", cfg.kappa},
                {"m_iter", cfg.m_iter},
                {"M", cfg.M},
                {"ls_mode", cfg.ls_mode},
                {"seed", cfg.seed}};
}

BoostConfig config_from_json(const json& j) {
    BoostConfig cfg;
    cfg.target_loss = LossSpec::parse(j.at("loss").get<std::string>());
    cfg.kappa = j.at("kappa").get<double>();
    cfg.m_iter = j.at("m_iter").get<std::size_t>();
    cfg.M = j.at("M").get<std::size_t>();
    cfg.ls_mode = j.at("ls_mode").get<bool>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

json trace_to_json(const FitTrace& trace) {
    json iters = json::array();
    for (const auto& rec : trace.iterations) {
        json r{{"iter", rec.index},
               {"column", rec.selected_column >= 0 ? rec.selected_column + 1 : -1},
               {"increment", rec.coefficient_increment},
               {"intercept_increment", rec.intercept_increment},
               {"risk_l2", rec.training_risk_l2},
               {"risk_target", rec.training_risk_target},
               {"singular", rec.is_singular}};
        if (rec.corr_ratio) r["corr_ratio"] = *rec.corr_ratio;
        iters.push_back(std::move(r));
    }
    json j{{"p", trace.p},
           {"m_iter", trace.m_iter},
           {"initial_offset", trace.initial_offset},
           {"iterations", std::move(iters)}};
    if (trace.stopped_at) j["stopped_at"] = *trace.stopped_at;
    return j;
}

FitTrace trace_from_json(const json& j) {
    FitTrace trace;
    trace.p = j.at("p").get<std::size_t>();
    trace.m_iter = j.at("m_iter").get<std::size_t>();
    trace.initial_offset = j.at("initial_offset").get<double>();
    if (j.contains("stopped_at")) trace.stopped_at = j.at("stopped_at").get<std::size_t>();
    for (const auto& r : j.at("iterations")) {
        IterationRecord rec;
        rec.index = r.at("iter").get<std::size_t>();
        const long col = r.at("column").get<long>();
        rec.selected_column = col >= 1 ? col - 1 : -1;
        rec.coefficient_increment = r.at("increment").get<double>();
        rec.intercept_increment = r.at("intercept_increment").get<double>();
        rec.training_risk_l2 = r.at("risk_l2").get<double>();
        rec.training_risk_target = r.at("risk_target").get<double>();
        rec.is_singular = r.at("singular").get<bool>();
        if (r.contains("corr_ratio")) rec.corr_ratio = r.at("corr_ratio").get<double>();
        trace.iterations.push_back(std::move(rec));
    }
    return trace;
}

const char* mode_name(MeasureMode mode) {
    return mode == MeasureMode::Frequency ? "frequency" : "indicator";
}

MeasureMode mode_from_name(const std::string& name) {
    if (name == "frequency") return MeasureMode::Frequency;
    if (name == "indicator") return MeasureMode::Indicator;
    throw std::invalid_argument("measure: unknown mode '" + name + "'");
}

}  // namespace

std::string model_to_json(const LinearModel& model) {
    std::vector<long> selected;
    for (const auto& rec : model.trace.iterations)
        selected.push_back(rec.selected_column >= 0 ? rec.selected_column + 1 : -1);
    json j{{"intercept", model.intercept},
           {"beta", model.beta},
           {"selected_sequence", selected},
           {"config", config_to_json(model.config)},
           {"fitter", model.fitter},
           {"standardization",
            json{{"means", model.standardization.means},
                 {"sds", model.standardization.sds},
                 {"y_mean", model.standardization.y_mean},
                 {"kept", model.standardization.kept},
                 {"dropped", model.standardization.dropped},
                 {"original_names", model.standardization.original_names}}},
           {"trace", trace_to_json(model.trace)}};
    return j.dump(2) + "\n";
}

LinearModel model_from_json(const std::string& text) {
    const json j = json::parse(text);
    LinearModel model;
    model.intercept = j.at("intercept").get<double>();
    model.beta = j.at("beta").get<std::vector<double>>();
    model.config = config_from_json(j.at("config"));
    model.fitter = j.value("fitter", "");
    const json& s = j.at("standardization");
    model.standardization.means = s.at("means").get<std::vector<double>>();
    model.standardization.sds = s.at("sds").get<std::vector<double>>();
    model.standardization.y_mean = s.at("y_mean").get<double>();
    model.standardization.kept = s.at("kept").get<std::vector<std::size_t>>();
    model.standardization.dropped = s.at("dropped").get<std::vector<std::size_t>>();
    model.standardization.original_names =
        s.at("original_names").get<std::vector<std::string>>();
    model.trace = trace_from_json(j.at("trace"));
    return model;
}

void save_model_json(const LinearModel& model, const std::string& path) {
    write_file(path, model_to_json(model));
}

LinearModel load_model_json(const std::string& path) {
    return model_from_json(read_file(path));
}

void save_trace_csv(const FitTrace& trace, const std::string& path) {
    std::ostringstream out;
    out << "iter,column,increment,intercept_increment,risk_l2,risk_target,singular,corr_ratio\n";
    out.precision(17);
    for (const auto& rec : trace.iterations) {
        out << rec.index << ','
            << (rec.selected_column >= 0 ? rec.selected_column + 1 : -1) << ','
            << rec.coefficient_increment << ',' << rec.intercept_increment << ','
            << rec.training_risk_l2 << ',' << rec.training_risk_target << ','
            << (rec.is_singular ? 1 : 0) << ',';
        if (rec.corr_ratio) out << *rec.corr_ratio;
        out << '\n';
    }
    write_file(path, out.str());
}

void save_paths_csv(const LinearModel& model, const std::string& path) {
    const auto rows = coefficient_paths(model);
    std::ostringstream out;
    out << "iter,intercept";
    for (std::size_t j = 1; j <= model.trace.p; ++j) out << ",beta_" << j;
    out << '\n';
    out.precision(17);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out << k;
        for (double v : rows[k]) out << ',' << v;
        out << '\n';
    }
    write_file(path, out.str());
}

void save_corr_min_json(const CorrMinReport& report, const std::string& path) {
    json j{{"iteration", report.iteration}, {"ratio", report.ratio}};
    j["min_ratio"] = report.min_ratio ? json(*report.min_ratio) : json(nullptr);
    write_file(path, j.dump(2) + "\n");
}

std::string measure_to_json(const ColumnMeasure& m) {
    json j{{"origin_loss", m.origin_loss}, {"mode", mode_name(m.mode)}, {"mass", m.mass}};
    return j.dump(2) + "\n";
}

ColumnMeasure measure_from_json(const std::string& text) {
    const json j = json::parse(text);
    return make_column_measure(j.at("mass").get<std::vector<double>>(),
                               j.value("origin_loss", ""),
                               mode_from_name(j.value("mode", "frequency")));
}

void save_measure_json(const ColumnMeasure& m, const std::string& path) {
    write_file(path, measure_to_json(m));
}

ColumnMeasure load_measure_json(const std::string& path) {
    return measure_from_json(read_file(path));
}

void save_singular_part_json(const SingularPartReport& report, const std::string& path) {
    std::vector<std::size_t> sing_1b, common_1b;
    for (std::size_t j : report.j_sing) sing_1b.push_back(j + 1);
    for (std::size_t j : report.j_common) common_1b.push_back(j + 1);
    json j{{"j_sing", sing_1b},
           {"j_common", common_1b},
           {"dominated", report.dominated},
           {"absolutely_continuous", report.absolutely_continuous.mass},
           {"singular", report.singular.mass}};
    write_file(path, j.dump(2) + "\n");
}

}  // namespace singboost
