#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "singboost/serialization.hpp"

#ifndef SINGBOOST_CLI_PATH
#define SINGBOOST_CLI_PATH "singboost"
#endif

namespace {

const std::string kWorkDir = "/tmp/singboost_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(SINGBOOST_CLI_PATH) + " " + args + " 2>" +
                            kWorkDir + "/stderr.txt";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json load_json(const std::string& path) {
    return nlohmann::json::parse(slurp(path));
}

std::size_t line_count(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines;
}

struct WorkDir {
    WorkDir() {
        const int rc =
            std::system(("rm -rf " + kWorkDir + " && mkdir -p " + kWorkDir).c_str());
        if (rc != 0) std::abort();
    }
};

const WorkDir setup;  // NOLINT

}  // namespace

TEST_CASE("simulate writes reproducible files") {
    const std::string data = kWorkDir + "/data.csv";
    REQUIRE(run("simulate --n 100 --p 50 --s0 10 --snr 2 --seed 1 -o " + data) == 0);
    const std::string first_csv = slurp(data);
    const std::string first_truth = slurp(kWorkDir + "/data.truth.json");
    CHECK_FALSE(first_csv.empty());

    const auto truth = nlohmann::json::parse(first_truth);
    CHECK(truth["support"].size() == 10);
    CHECK(truth["true_beta"].size() == 50);
    CHECK(truth["seed"] == 1);

    REQUIRE(run("simulate --n 100 --p 50 --s0 10 --snr 2 --seed 1 -o " + data) == 0);
    CHECK(slurp(data) == first_csv);
    CHECK(slurp(kWorkDir + "/data.truth.json") == first_truth);
}

TEST_CASE("simulate validates the spec") {
    CHECK(run("simulate --p 50 --s0 60 -o " + kWorkDir + "/bad.csv") != 0);
    const std::string err = slurp(kWorkDir + "/stderr.txt");
    CHECK(err.rfind("error: invalid-argument:", 0) == 0);
}

TEST_CASE("fit produces model, trace and corr-min files") {
    const std::string data = kWorkDir + "/data.csv";
    const std::string model = kWorkDir + "/model.json";
    REQUIRE(run("fit --data " + data + " --target y --loss l2 --kappa 0.1 --miter 50 -o " +
                model) == 0);
    const auto m = singboost::load_model_json(model);
    CHECK(m.fitter == "l2boost");
    CHECK(m.beta.size() == 50);
    CHECK(m.trace.iterations.size() == 50);
    CHECK(line_count(slurp(kWorkDir + "/model.trace.csv")) == 51);  // header + rows
    const auto corrmin = load_json(kWorkDir + "/model.corrmin.json");
    CHECK(corrmin["ratio"].empty());

    // Re-running is byte-identical.
    const std::string once = slurp(model);
    REQUIRE(run("fit --data " + data + " --target y --loss l2 --kappa 0.1 --miter 50 -o " +
                model) == 0);
    CHECK(slurp(model) == once);
}

TEST_CASE("fit dispatches hardrank to SingBoost and enforces the flag") {
    const std::string data = kWorkDir + "/data.csv";
    CHECK(run("fit --data " + data + " --loss hardrank -o " + kWorkDir + "/x.json") != 0);
    const std::string err = slurp(kWorkDir + "/stderr.txt");
    CHECK(err.rfind("error: invalid-argument:", 0) == 0);
    CHECK(err.find("--sing") != std::string::npos);

    const std::string model = kWorkDir + "/sing.json";
    REQUIRE(run("fit --data " + data + " --loss hardrank --miter 100 --M 5 --ls -o " +
                model) == 0);
    const auto m = singboost::load_model_json(model);
    CHECK(m.fitter == "singboost");
    std::size_t singular = 0;
    for (const auto& rec : m.trace.iterations)
        if (rec.is_singular) ++singular;
    CHECK(singular == 20);
    const auto corrmin = load_json(kWorkDir + "/sing.corrmin.json");
    CHECK(corrmin["ratio"].size() == 20);
}

TEST_CASE("fit dispatches differentiable losses to the gradient fitter") {
    const std::string model = kWorkDir + "/l1.json";
    REQUIRE(run("fit --data " + kWorkDir + "/data.csv --loss l1 --miter 20 -o " + model) ==
            0);
    CHECK(singboost::load_model_json(model).fitter == "generic");

    REQUIRE(run("fit --data " + kWorkDir +
                "/data.csv --loss huber:2.0 --miter 20 --sing --M 4 -o " + model) == 0);
    const auto sing = singboost::load_model_json(model);
    CHECK(sing.fitter == "singboost");
    CHECK(sing.config.target_loss.kind == singboost::LossKind::Huber);
}

TEST_CASE("paths exports one row per iteration plus the offset row") {
    REQUIRE(run("paths --model " + kWorkDir + "/sing.json -o " + kWorkDir + "/paths.csv") ==
            0);
    const std::string text = slurp(kWorkDir + "/paths.csv");
    CHECK(line_count(text) == 102);  // header + 101 rows
    CHECK(text.rfind("iter,intercept,beta_1", 0) == 0);
}

TEST_CASE("measure from a model and induced over subsamples") {
    REQUIRE(run("measure --model " + kWorkDir + "/sing.json --mode frequency -o " +
                kWorkDir + "/nu_rank.json") == 0);
    const auto nu = singboost::load_measure_json(kWorkDir + "/nu_rank.json");
    CHECK(nu.mass.size() == 50);
    CHECK(nu.origin_loss == "hardrank");

    REQUIRE(run("measure --data " + kWorkDir + "/data.csv --loss l2 --miter 20 --b 5 "
                "--mode indicator --seed 3 -o " + kWorkDir + "/nu_l2.json") == 0);
    const auto induced = singboost::load_measure_json(kWorkDir + "/nu_l2.json");
    CHECK(induced.mass.size() == 50);

    const std::string once = slurp(kWorkDir + "/nu_l2.json");
    REQUIRE(run("measure --data " + kWorkDir + "/data.csv --loss l2 --miter 20 --b 5 "
                "--mode indicator --seed 3 -o " + kWorkDir + "/nu_l2.json") == 0);
    CHECK(slurp(kWorkDir + "/nu_l2.json") == once);
}

TEST_CASE("singular-parts compares two measure files") {
    REQUIRE(run("singular-parts --nu " + kWorkDir + "/nu_l2.json --nu-tilde " + kWorkDir +
                "/nu_rank.json -o " + kWorkDir + "/parts.json") == 0);
    const auto parts = load_json(kWorkDir + "/parts.json");
    CHECK(parts.contains("j_sing"));
    CHECK(parts.contains("dominated"));
}

TEST_CASE("reject-sample reports frequencies and the TV distance") {
    {
        std::ofstream nu(kWorkDir + "/nu.json");
        nu << R"({"origin_loss":"l2","mode":"frequency","mass":[0.6,0.3,0.0]})";
        std::ofstream tilde(kWorkDir + "/nu_tilde.json");
        tilde << R"({"origin_loss":"hardrank","mode":"frequency","mass":[0.2,0.4,0.4]})";
    }
    REQUIRE(run("reject-sample --nu " + kWorkDir + "/nu.json --nu-tilde " + kWorkDir +
                "/nu_tilde.json --draws 20000 --seed 7 -o " + kWorkDir + "/rej.json") == 0);
    const auto report = load_json(kWorkDir + "/rej.json");
    CHECK(report["draws"] == 20000);
    CHECK(report["tv_distance"].get<double>() <= 0.02);
    CHECK(report["implied_law"].size() == 3);

    const std::string once = slurp(kWorkDir + "/rej.json");
    REQUIRE(run("reject-sample --nu " + kWorkDir + "/nu.json --nu-tilde " + kWorkDir +
                "/nu_tilde.json --draws 20000 --seed 7 -o " + kWorkDir + "/rej.json") == 0);
    CHECK(slurp(kWorkDir + "/rej.json") == once);
}

TEST_CASE("expected-onestep shrinks the k-step estimate") {
    REQUIRE(run("expected-onestep --data " + kWorkDir + "/data.csv --measure " + kWorkDir +
                "/nu_rank.json --k 2 -o " + kWorkDir + "/eos.json") == 0);
    const auto out = load_json(kWorkDir + "/eos.json");
    REQUIRE(out["theta"].size() == 50);
    REQUIRE(out["k_step"].size() == 50);
    const auto nu = singboost::load_measure_json(kWorkDir + "/nu_rank.json");
    for (std::size_t j = 0; j < 50; ++j) {
        const double expected = nu.mass[j] * out["k_step"][j].get<double>();
        CHECK(out["theta"][j].get<double>() == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("column scans are schedule-independent") {
    // The same hardrank fit under a 4-thread budget must be byte-identical to
    // the single-thread run from the earlier test case.
    const std::string reference = slurp(kWorkDir + "/sing.json");
    const std::string cmd = std::string("SINGBOOST_THREADS=4 ") + SINGBOOST_CLI_PATH +
                            " fit --data " + kWorkDir +
                            "/data.csv --loss hardrank --miter 100 --M 5 --ls -o " +
                            kWorkDir + "/sing_mt.json 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    std::string threaded = slurp(kWorkDir + "/sing_mt.json");
    CHECK(threaded == reference);
}

TEST_CASE("unknown loss fails with the stable prefix") {
    CHECK(run("fit --data " + kWorkDir + "/data.csv --loss hinge -o " + kWorkDir +
              "/z.json") != 0);
    CHECK(slurp(kWorkDir + "/stderr.txt").rfind("error: invalid-argument:", 0) == 0);
}
