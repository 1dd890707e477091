#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "drmpc/cli.hpp"
#include "drmpc/io.hpp"
#include "support.hpp"

using namespace drmpc;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = DRMPC_SOURCE_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("drmpc_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "drmpc");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

void write(const fs::path& p, const io::Json& j) { std::ofstream(p) << j.dump(2); }

io::Json base_config(const fs::path& model, const fs::path& out) {
  return {{"model", model.string()},
          {"mode", "robust"},
          {"horizon_n", 6},
          {"deadbeat_m", 3},
          {"seed", 3},
          {"output_dir", out.string()},
          {"sim", {{"steps", 20}, {"x0", {10.0, 5.0}}}},
          {"roa", {{"points_per_axis", 21}, {"horizons", {4, 6}}}},
          {"experiment", {{"horizons", {4, 5}}, {"deltas", {0.1}}, {"realizations", 2}}}};
}

}  // namespace

TEST(Io, ShippedBenchmarkMatchesHandModel) {
  const LpvModel a = io::model_from_json(io::read_json_file((kRoot / "benchmark_fleming.json").string()));
  const LpvModel b = fx::benchmark(0.1);
  EXPECT_EQ(a.a_bar, b.a_bar);
  EXPECT_EQ(a.b_bar, b.b_bar);
  ASSERT_EQ(a.p(), 2);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(a.a_terms[i], b.a_terms[i]);
    EXPECT_EQ(a.b_terms[i], b.b_terms[i]);
  }
  EXPECT_EQ(a.x_set.offsets(), b.x_set.offsets());
  EXPECT_EQ(a.u_set.offsets(), b.u_set.offsets());
  EXPECT_EQ(a.theta_delta_set.offsets(), b.theta_delta_set.offsets());
  EXPECT_EQ(a.w_set.size(), 1u);
}

TEST(Io, RoundTrips) {
  const LpvModel m = fx::benchmark();
  const LpvModel back = io::model_from_json(io::to_json(m));
  EXPECT_EQ(back.a_bar, m.a_bar);
  EXPECT_EQ(back.theta_set.normals(), m.theta_set.normals());
  const DeadbeatPolicy p = solve_gains_lti(m.a_bar, m.b_bar, 3);
  const DeadbeatPolicy q = io::policy_from_json(io::to_json(p));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(p.gains[i], q.gains[i]);
  EXPECT_EQ(io::polytope_v_from_json(io::to_json(m.w_set), "w").size(), 1u);
  EXPECT_EQ(io::content_hash(io::to_json(m)), io::content_hash(io::to_json(back)));
}

TEST(Io, MalformedInputsAreConfigErrors) {
  auto kind = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::numerical;
  };
  EXPECT_EQ(kind([] { io::matrix_from_json(io::Json::parse("[[1,2],[3]]"), "m"); }), ErrorKind::config);
  EXPECT_EQ(kind([] { io::matrix_from_json(io::Json::parse("[[1,\"a\"]]"), "m"); }), ErrorKind::config);
  EXPECT_EQ(kind([] { io::model_from_json(io::Json::parse("{}")); }), ErrorKind::config);
  EXPECT_EQ(kind([] { io::read_json_file("/nonexistent/file.json"); }), ErrorKind::config);
}

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(cli::exit_code(ErrorKind::infeasible), 2);
  EXPECT_EQ(cli::exit_code(ErrorKind::tightening_infeasible), 2);
  EXPECT_EQ(cli::exit_code(ErrorKind::numerical), 3);
  EXPECT_EQ(cli::exit_code(ErrorKind::uncontrollable), 3);
  EXPECT_EQ(cli::exit_code(ErrorKind::config), 4);
}

TEST(Cli, ConfigLoading) {
  TempDir t;
  write(t.path / "cfg.json", base_config("model.json", "out"));
  const cli::RunConfig c = cli::load_run_config((t.path / "cfg.json").string());
  EXPECT_EQ(fs::path(c.model_path), t.path / "model.json");
  EXPECT_EQ(c.horizon_n, 6);
  EXPECT_EQ(c.sim.steps, 20);
  EXPECT_EQ(c.roa.points_per_axis, 21);
  io::Json bad = base_config("m.json", "o");
  bad["horizon_n"] = 2;
  write(t.path / "bad.json", bad);
  EXPECT_THROW(cli::load_run_config((t.path / "bad.json").string()), Error);
}

TEST(Cli, PipelineCommands) {
  TempDir t;
  const io::Json cfg = base_config(kRoot / "benchmark_fleming.json", t.path / "out");
  write(t.path / "cfg.json", cfg);
  const std::string c = (t.path / "cfg.json").string();
  EXPECT_EQ(run_cli({"--config", c, "gains"}), 0);
  const io::Json pol = io::read_json_file((t.path / "out" / "policy.json").string());
  EXPECT_LE(pol["policy"]["residual"].get<double>(), 1e-9);
  EXPECT_EQ(pol["meta"]["seed"].get<int>(), 3);
  EXPECT_EQ(run_cli({"--config", c, "--seed", "9", "sets"}), 0);
  EXPECT_EQ(io::read_json_file((t.path / "out" / "tightened_sets.json").string())["meta"]["seed"].get<int>(), 9);
  EXPECT_EQ(run_cli({"--config", c, "--strict", "--dump-qp", (t.path / "qp.txt").string(), "simulate"}), 0);
  EXPECT_TRUE(fs::exists(t.path / "qp.txt"));
  EXPECT_TRUE(fs::exists(t.path / "out" / "trace.csv"));
  std::ifstream csv(t.path / "out" / "trace.csv");
  std::string first;
  std::getline(csv, first);
  EXPECT_EQ(first.rfind("# config_hash=", 0), 0u);
  EXPECT_EQ(run_cli({"--config", c, "--output", (t.path / "roa").string(), "roa"}), 0);
  EXPECT_TRUE(fs::exists(t.path / "roa" / "roa_N6.csv"));
  EXPECT_TRUE(fs::exists(t.path / "roa" / "roa.json"));
}

TEST(Cli, ExperimentCommand) {
  TempDir t;
  io::Json cfg = base_config(kRoot / "benchmark_fleming.json", t.path / "out");
  cfg["mode"] = "lpv";
  write(t.path / "cfg.json", cfg);
  EXPECT_EQ(run_cli({"--config", (t.path / "cfg.json").string(), "experiment"}), 0);
  const io::Json r = io::read_json_file((t.path / "out" / "rinc.json").string());
  EXPECT_EQ(r["meta"]["gain_policy"].get<std::string>(), "shared");
  EXPECT_TRUE(r["meta"].contains("theta_realization"));
  ASSERT_EQ(r["tables"].size(), 1u);
}

TEST(Cli, IdempotentOutputs) {
  TempDir t;
  write(t.path / "cfg.json", base_config(kRoot / "benchmark_fleming.json", t.path / "out"));
  const std::string c = (t.path / "cfg.json").string();
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  ASSERT_EQ(run_cli({"--config", c, "simulate"}), 0);
  const std::string a = slurp(t.path / "out" / "trace.csv");
  ASSERT_EQ(run_cli({"--config", c, "simulate"}), 0);
  EXPECT_EQ(a, slurp(t.path / "out" / "trace.csv"));
}

TEST(Cli, ErrorExitCodes) {
  TempDir t;
  // B = 0: uncontrollable.
  io::Json model = io::to_json(fx::benchmark());
  model["b_bar"] = {{0.0}, {0.0}};
  write(t.path / "b0.json", model);
  io::Json cfg = base_config(t.path / "b0.json", t.path / "out");
  cfg.erase("deadbeat_m");
  write(t.path / "cfg.json", cfg);
  EXPECT_EQ(run_cli({"--config", (t.path / "cfg.json").string(), "gains"}), 3);

  // Input set too small for the disturbance: tightening infeasible.
  io::Json small = io::to_json(fx::benchmark());
  small["u_set"] = {{"lower", {-0.5}}, {"upper", {0.5}}};
  write(t.path / "small.json", small);
  write(t.path / "cfg2.json", base_config(t.path / "small.json", t.path / "out"));
  EXPECT_EQ(run_cli({"--config", (t.path / "cfg2.json").string(), "sets"}), 2);

  // Infeasible start.
  io::Json far = base_config(kRoot / "benchmark_fleming.json", t.path / "out");
  far["sim"]["x0"] = {59.0, 41.0};
  write(t.path / "cfg3.json", far);
  EXPECT_EQ(run_cli({"--config", (t.path / "cfg3.json").string(), "simulate"}), 2);

  std::ofstream(t.path / "broken.json") << "{ not json";
  EXPECT_EQ(run_cli({"--config", (t.path / "broken.json").string(), "gains"}), 4);
  EXPECT_EQ(run_cli({"--config", (t.path / "cfg3.json").string()}), 4);
  EXPECT_EQ(run_cli({"--config", (t.path / "cfg3.json").string(), "bogus"}), 4);
}

TEST(Cli, IdentityInputToyModel) {
  TempDir t;
  io::Json model = io::to_json(fx::benchmark());
  model["b_bar"] = {{1.0, 0.0}, {0.0, 1.0}};
  model["b_terms"] = {{{0.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {0.0, 0.0}}};
  model["u_set"] = {{"lower", {-100.0, -100.0}}, {"upper", {100.0, 100.0}}};
  write(t.path / "toy.json", model);
  io::Json cfg = base_config(t.path / "toy.json", t.path / "out");
  cfg["deadbeat_m"] = 1;
  cfg["cost"] = {{"q", {{1.0, 0.0}, {0.0, 1.0}}}, {"r", {{1.0, 0.0}, {0.0, 1.0}}}};
  write(t.path / "cfg.json", cfg);
  ASSERT_EQ(run_cli({"--config", (t.path / "cfg.json").string(), "gains"}), 0);
  const io::Json pol = io::read_json_file((t.path / "out" / "policy.json").string());
  const Mat k = io::matrix_from_json(pol["policy"]["gains"][0], "k");
  EXPECT_TRUE(k.isApprox(-fx::benchmark().a_bar, 1e-12));
}
