// test_cli.cpp — configuration parsing and command execution of the oqs runner

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oqs_cli/config.hpp"
#include "oqs_cli/runner.hpp"

namespace fs = std::filesystem;
using namespace oqs;
using namespace oqs::cli;

namespace {

fs::path data(const std::string& name) { return fs::path(OQS_TEST_DATA_DIR) / name; }

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("oqs_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] const fs::path& path() const { return path_; }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  fs::path path_;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const std::string& command, const fs::path& path) {
  try {
    (void)parse_config(command, path);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const char* kBathBlock = "[bath]\nomega = 1.0\ncoupling = 0.2\nbeta = 2.0\n";

}  // namespace

TEST(ParseConfig, MinimalObservableConfig) {
  const RunConfig cfg = parse_config("observable", data("minimal_observable.ini"));
  EXPECT_EQ(cfg.system.preset, "spin_boson");
  EXPECT_EQ(cfg.system.observable, "sigma_x");
  ASSERT_EQ(cfg.bath.omega.size(), 1u);
  EXPECT_DOUBLE_EQ(cfg.bath.coupling[0], 0.2);
  EXPECT_EQ(cfg.dyson.max_order, 4);
  EXPECT_EQ(cfg.dyson.integrator, Integrator::monte_carlo);
  EXPECT_EQ(cfg.dyson.seed, 11u);
  EXPECT_EQ(cfg.truncation.n_max, 20);
  const auto src = cfg.bath.build();
  ASSERT_TRUE(std::holds_alternative<BathSpec>(src));
  EXPECT_DOUBLE_EQ(std::get<BathSpec>(src).beta, 2.0);
}

TEST(ParseConfig, OddMaxOrderRejected) {
  const std::string msg = config_error("observable", data("odd_order.ini"));
  EXPECT_NE(msg.find("max_order must be even"), std::string::npos) << msg;
  EXPECT_NE(msg.find("dyson.max_order"), std::string::npos) << msg;
  EXPECT_NE(msg.find("odd_order.ini:11"), std::string::npos) << msg;
}

TEST(ParseConfig, UnknownKeyNamed) {
  const std::string msg = config_error("observable", data("typo_key.ini"));
  EXPECT_NE(msg.find("dyson.samles"), std::string::npos) << msg;
  EXPECT_NE(msg.find("unknown key"), std::string::npos) << msg;
}

TEST(ParseConfig, UnknownSectionAndMalformedValues) {
  TempDir dir;
  EXPECT_NE(config_error("observable", dir.write("a.ini", std::string(kBathBlock) + "[dysn]\nt = 1\n"))
                .find("unknown section"),
            std::string::npos);
  EXPECT_NE(config_error("observable", dir.write("b.ini", std::string(kBathBlock) + "[dyson]\nt = abc\n"))
                .find("dyson.t"),
            std::string::npos);
  EXPECT_NE(config_error("observable", dir.write("c.ini", "[bath]\nomega = 1.0\ncoupling = 0.2\nbeta = -1\n"))
                .find("beta must be > 0"),
            std::string::npos);
  EXPECT_NE(config_error("observable", dir.write("d.ini", "[bath]\nomega = 1.0, 2.0\ncoupling = 0.2\nbeta = 1\n"))
                .find("bath.coupling"),
            std::string::npos);
  EXPECT_NE(config_error("observable", dir.write("e.ini", "[bath]\nomega = 1.0\ncoupling = 0.2\n"))
                .find("bath.beta: missing required key"),
            std::string::npos);
  EXPECT_NE(config_error("observable",
                         dir.write("f.ini", std::string(kBathBlock) + "[dyson]\nsamples_per_order = 0\n"))
                .find("dyson.samples_per_order"),
            std::string::npos);
  EXPECT_NE(config_error("observable",
                         dir.write("g.ini", std::string(kBathBlock) + "[system]\npreset = spin_boson\ndim = 2\n"))
                .find("system.dim"),
            std::string::npos);
  EXPECT_NE(config_error("bound", dir.write("h.ini", kBathBlock)).find("perturbed_bath"), std::string::npos);
  EXPECT_NE(config_error("frobnicate", dir.write("i.ini", kBathBlock)).find("unknown command"),
            std::string::npos);
}

TEST(ParseConfig, OverridesAndEnvironment) {
  Overrides ov;
  ov.workers = 3;
  ov.seed = 99;
  ov.out = "elsewhere";
  ov.m = 6;
  ::setenv("OQS_MEMORY_CEILING", "123", 1);
  const RunConfig cfg = parse_config("observable", data("minimal_observable.ini"), ov);
  ::unsetenv("OQS_MEMORY_CEILING");
  EXPECT_EQ(cfg.dyson.workers, 3u);
  EXPECT_EQ(cfg.dyson.seed, 99u);
  EXPECT_EQ(cfg.out, "elsewhere");
  EXPECT_EQ(cfg.check.m, 6);
  EXPECT_EQ(cfg.truncation.memory_ceiling, 123u);

  ::setenv("OQS_MEMORY_CEILING", "lots", 1);
  EXPECT_THROW((void)parse_config("observable", data("minimal_observable.ini")), ConfigError);
  ::unsetenv("OQS_MEMORY_CEILING");
}

TEST(ParseConfig, ExplicitSystemAndTable) {
  const RunConfig cfg = parse_config("observable", data("table_bath.ini"));
  const SystemSpec sys = cfg.system.build();
  EXPECT_EQ(sys.dim(), 2);
  EXPECT_DOUBLE_EQ(sys.o_s()(0, 1).real(), 1.0);
  EXPECT_EQ(cfg.bath.kind, "table");
  EXPECT_TRUE(std::holds_alternative<TabulatedCorrelation>(cfg.bath.build()));
}

TEST(ParseConfig, SpectralAndScaledBaths) {
  TempDir dir;
  const auto p = dir.write("s.ini",
                           "[bath]\nspectral = ohmic\nalpha = 0.1\nomega_c = 2.0\nomega_max = 4.0\n"
                           "n_modes = 4\nbeta = 1.0\n"
                           "[perturbed_bath]\ncoupling_scale = 1.05\nomega_scale = 0.9\n");
  const RunConfig cfg = parse_config("observable", p);
  const BathSpec base = std::get<BathSpec>(cfg.bath.build());
  ASSERT_EQ(base.modes.size(), 4u);
  EXPECT_DOUBLE_EQ(base.modes[0].omega, 0.5);
  const double j = 0.5 * 3.14159265358979323846 * 0.1 * 0.5 * std::exp(-0.25);
  EXPECT_NEAR(base.modes[0].c, std::sqrt(2.0 * 0.5 * j * 1.0 / 3.14159265358979323846), 1e-14);
  const BathSpec pert = std::get<BathSpec>(cfg.perturbed_bath->build(base));
  EXPECT_DOUBLE_EQ(pert.modes[2].omega, 0.9 * base.modes[2].omega);
  EXPECT_DOUBLE_EQ(pert.modes[2].c, 1.05 * base.modes[2].c);
  EXPECT_DOUBLE_EQ(pert.beta, 1.0);
  EXPECT_EQ(cfg.truncation.n_max, FockTruncation::defaults_for(4).n_max);
}

TEST(ToJson, EchoesDefaults) {
  const RunConfig cfg = parse_config("observable", data("minimal_observable.ini"));
  const auto j = to_json(cfg);
  EXPECT_EQ(j["dyson"]["gauss_points"], cfg.dyson.gauss_points);
  EXPECT_EQ(j["truncation"]["n_max"], 20);
  EXPECT_EQ(j["check"]["m"], 4);
  EXPECT_DOUBLE_EQ(j["dyson"]["tolerances"]["imag"].get<double>(), 1e-8);
  EXPECT_TRUE(j["perturbed_bath"].is_null());
}

TEST(Run, BoundWithIdenticalBathsIsZero) {
  TempDir dir;
  Overrides ov;
  ov.out = (dir.path() / "bound").string();
  const RunConfig cfg = parse_config("bound", data("identical_baths.ini"), ov);
  std::ostringstream log;
  EXPECT_EQ(run(cfg, log), kExitOk) << log.str();
  const auto summary = nlohmann::json::parse(read_file(dir.path() / "bound_summary.json"));
  EXPECT_EQ(summary["results"]["general"]["bound_value"].get<double>(), 0.0);
  EXPECT_EQ(summary["results"]["corollary"]["bound_value"].get<double>(), 0.0);
  EXPECT_NEAR(summary["results"]["oracle"]["delta"].get<double>(), 0.0, 1e-14);
  EXPECT_EQ(summary["exit_code"], 0);
  EXPECT_TRUE(summary.contains("timestamp"));
  EXPECT_EQ(summary["config"]["truncation"]["n_max"], 12);
  EXPECT_FALSE(fs::exists(dir.path() / "bound_orders.csv"));
}

TEST(Run, CombConstantCaseIsOneEighth) {
  TempDir dir;
  Overrides ov;
  ov.out = (dir.path() / "comb").string();
  const RunConfig cfg = parse_config("check-comb", data("comb_constant.ini"), ov);
  const RunOutcome r = execute(cfg);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_NEAR(r.results["lhs"]["re"].get<double>(), 0.125, 1e-10);
  EXPECT_NEAR(r.results["rhs"]["re"].get<double>(), 0.125, 1e-10);
  EXPECT_TRUE(r.results["deterministic"].get<bool>());
}

TEST(Run, ObservableCsvIsReproducibleAcrossWorkers) {
  TempDir dir;
  std::string bodies[2];
  const unsigned workers[2] = {1, 3};
  for (int k = 0; k < 2; ++k) {
    Overrides ov;
    ov.workers = workers[k];
    ov.out = (dir.path() / ("run" + std::to_string(k))).string();
    std::ostringstream log;
    EXPECT_EQ(run(parse_config("observable", data("minimal_observable.ini"), ov), log), kExitOk) << log.str();
    bodies[k] = read_file(dir.path() / ("run" + std::to_string(k) + "_orders.csv"));
  }
  EXPECT_EQ(bodies[0], bodies[1]);
  EXPECT_EQ(bodies[0].substr(0, 16), "m,re,im,stderr\n0");
}

TEST(Run, TabulatedObservable) {
  const RunConfig cfg = parse_config("observable", data("table_bath.ini"));
  const RunOutcome r = execute(cfg);
  EXPECT_EQ(r.exit_code, kExitOk);
  ASSERT_TRUE(r.orders_csv.has_value());
  EXPECT_EQ(r.results["orders"].size(), 2u);
}

TEST(Run, OracleAndWick) {
  TempDir dir;
  const auto p = dir.write("o.ini",
                           "[system]\nobservable = sigma_x\ninitial_state = plus\n" + std::string(kBathBlock) +
                               "[dyson]\nt = 1.0\n[truncation]\nn_max = 12\n[check]\nm = 3\nsamples = 5\n");
  const RunOutcome o = execute(parse_config("oracle", p));
  EXPECT_EQ(o.exit_code, kExitOk);
  EXPECT_LT(o.results["thermal_tail_mass"].get<double>(), 1e-8);
  EXPECT_EQ(o.results["total_dim"], 26);
  const RunOutcome w = execute(parse_config("check-wick", p));
  EXPECT_EQ(w.exit_code, kExitOk);
  EXPECT_EQ(w.results["orders"].size(), 3u);
}

TEST(Run, ConfigErrorsMapToExitOne) {
  TempDir dir;
  Overrides ov;
  ov.out = (dir.path() / "x").string();
  ::setenv("OQS_MEMORY_CEILING", "4", 1);
  const RunConfig cfg = parse_config("oracle", data("identical_baths.ini"), ov);
  ::unsetenv("OQS_MEMORY_CEILING");
  std::ostringstream log;
  EXPECT_EQ(run(cfg, log), kExitConfig);
  EXPECT_NE(log.str().find("invalid input"), std::string::npos) << log.str();
}
