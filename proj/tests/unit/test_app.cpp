#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "fixtures.hpp"
#include "hemo/bench.hpp"
#include "hemo/config.hpp"
#include "hemo/mms.hpp"
#include "hemo/output.hpp"
#include "hemo/simulation.hpp"

using namespace hemo;
using namespace hemo::testing;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// data lines, without the `#` header comments
std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (l.rfind('#', 0) != 0) out.push_back(l);
  }
  return out;
}

constexpr const char* kSmallRun = R"(
[mesh]
generator = cylinder
radius = 1
length = 4
n_cross = 2
n_axial = 4

[inflow]
type = ramped
flow = 10
ramp_time = 0.05
perturbation = 0.01

[outlet:outlet]
type = rcr
proximal = 100
capacitance = 1e-4
distal = 1233

[time]
dt = 0.01
steps = 4

[solver]
rtol = 1e-10

[run]
seed = 7
)";

}  // namespace

TEST(Config, ParsesAllSections) {
  const SimulationConfig cfg = load_config(std::filesystem::path(HEMO_SOURCE_DIR) / "configs/cylinder_rcr.ini");
  EXPECT_EQ(cfg.mesh.generator, "cylinder");
  ASSERT_EQ(cfg.outlets.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<Windkessel>(cfg.outlets[0].model));
  EXPECT_EQ(cfg.linear.precond, BlockPrecond::scr);

  const SimulationConfig small = parse_config(kSmallRun);
  EXPECT_EQ(small.steps, 4);
  EXPECT_DOUBLE_EQ(small.dt, 0.01);
  EXPECT_EQ(small.seed, 7u);
  EXPECT_DOUBLE_EQ(small.linear.outer.rtol, 1e-10);
  EXPECT_DOUBLE_EQ(small.inflow.flow(0.1), 10.0);
  for (const char* name : {"bench_cylinder.ini", "cylinder_resistance.ini", "mms.ini"}) {
    EXPECT_NO_THROW(load_config(std::filesystem::path(HEMO_SOURCE_DIR) / "configs" / name)) << name;
  }
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("[mesh]\ncolour = blue\n"), ConfigError);
  EXPECT_THROW(parse_config("[nonsense]\n"), ConfigError);
  EXPECT_THROW(parse_config("[fluid]\ndensity = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("[time]\nrho_inf = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("[outlet:outlet]\ntype = rcr\nproximal = 1\ncapacitance = 0\ndistal = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[solver]\npreconditioner = amg\n"), ConfigError);
  EXPECT_THROW(parse_config("[solver.a]\nrtol = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("[inflow]\ntype = table\ntimes = 0 1\nvalues = 1\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/hemo.ini"), ConfigError);
}

TEST(Run, RestProblemStaysAtRest) {
  SimulationConfig cfg = small_pipe_config("cylinder", 2, 4, 0.0, 1333.0);
  cfg.dt = 0.01;
  cfg.steps = 5;
  RunOptions opt;
  opt.deterministic = true;
  opt.output_dir = scratch_dir("rest");
  const RunSummary s = run_simulation(cfg, opt);
  EXPECT_EQ(s.steps, 5);
  EXPECT_EQ(s.unconverged_steps, 0);
  EXPECT_EQ(s.final_state.y.v.norm(), 0.0);
  EXPECT_EQ(s.final_state.pressure[0], 0.0);
  EXPECT_TRUE(std::filesystem::exists(*opt.output_dir / "final_state.vtk"));
}

TEST(Run, DeterministicOutputsAreReproducible) {
  SimulationConfig cfg = parse_config(kSmallRun);
  cfg.linear.direct = false;
  std::vector<std::string> steps, linear;
  for (int k = 0; k < 2; ++k) {
    RunOptions opt;
    opt.deterministic = true;
    opt.output_dir = scratch_dir("det" + std::to_string(k));
    const RunSummary s = run_simulation(cfg, opt);
    EXPECT_EQ(s.unconverged_steps, 0);
    EXPECT_FALSE(std::filesystem::exists(*opt.output_dir / "timings.csv"));
    steps.push_back(slurp(*opt.output_dir / "steps.csv"));
    linear.push_back(slurp(*opt.output_dir / "linear.csv"));
  }
  EXPECT_EQ(steps[0], steps[1]);
  EXPECT_EQ(linear[0], linear[1]);

  const auto rows = lines(steps[0]);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0],
            "step,time,newton_iterations,corrections,converged,residual_initial,residual_final,linear_iterations,"
            "Q_outlet,P_outlet,P_outlet_mmHg");
  EXPECT_EQ(lines(linear[0]).front(), "step,newton_iteration,iteration,rel_residual");

  // a different seed changes the perturbed inflow
  RunOptions other;
  other.deterministic = true;
  other.seed = 8;
  other.output_dir = scratch_dir("det_seed");
  run_simulation(cfg, other);
  EXPECT_NE(slurp(*other.output_dir / "steps.csv"), steps[0]);

  RunOptions timed;
  timed.output_dir = scratch_dir("timed");
  run_simulation(cfg, timed);
  EXPECT_TRUE(std::filesystem::exists(*timed.output_dir / "timings.csv"));
}

TEST(Output, VtkOfSingleTet) {
  const Mesh mesh = reference_tet_mesh();
  const FlowState s = random_state(4, 3, 1.0, 1.0);
  const std::string vtk = format_vtk(mesh, s);
  EXPECT_NE(vtk.find("POINTS 4"), std::string::npos);
  EXPECT_NE(vtk.find("CELLS 1 5"), std::string::npos);
  EXPECT_NE(vtk.find("CELL_TYPES 1\n10"), std::string::npos);
  EXPECT_NE(vtk.find("VECTORS velocity"), std::string::npos);
  EXPECT_NE(vtk.find("SCALARS pressure"), std::string::npos);
}

TEST(Output, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 133300.0, -2.5e-17, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(hex(0).size(), 16u);
  CsvWriter w({"a", "b"});
  EXPECT_THROW(w.row({"1"}), Error);
}

TEST(Bench, HashesAndHistories) {
  SimulationConfig cfg = small_pipe_config("cylinder", 2, 4, 50.0, 1333.0);
  cfg.bench.resistances = {1e3, 1e4};
  cfg.bench.preconditioners = {BlockPrecond::scr, BlockPrecond::simple};
  cfg.bench.inner_tolerances = {1e-2};
  cfg.linear.direct = false;
  BenchOptions opt;
  opt.deterministic = true;
  opt.output_dir = scratch_dir("bench");
  const auto cases = benchmark_preconditioners(cfg, opt);
  ASSERT_EQ(cases.size(), 4u);

  const std::regex hash_re("# operator_hash=([0-9a-f]{16})");
  for (double r : {1e3, 1e4}) {
    std::string seen;
    for (const auto& c : cases) {
      if (c.resistance != r) continue;
      const auto& h = c.report.outer.history;
      ASSERT_FALSE(h.empty());
      EXPECT_EQ(h.front(), 1.0);
      if (c.report.outer.converged) EXPECT_LE(h.back(), 1e-8);
      std::string name = "bench_R" + std::string(r == 1e3 ? "1000" : "10000") + "_" + std::string(to_string(c.precond));
      if (c.inner_rtol > 0.0) name += "_dI0.01";
      const std::string text = slurp(*opt.output_dir / (name + ".csv"));
      std::smatch m;
      ASSERT_TRUE(std::regex_search(text, m, hash_re)) << name;
      if (seen.empty()) seen = m[1];
      EXPECT_EQ(m[1], seen) << name;
      EXPECT_EQ(text.find("wall_seconds"), std::string::npos);
    }
  }
  EXPECT_TRUE(std::filesystem::exists(*opt.output_dir / "bench_summary.csv"));

  // same config, same histories
  BenchOptions again = opt;
  again.output_dir = scratch_dir("bench_again");
  const auto repeat = benchmark_preconditioners(cfg, again);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    EXPECT_EQ(repeat[i].report.outer.history, cases[i].report.outer.history);
    EXPECT_EQ(repeat[i].operator_hash, cases[i].operator_hash);
  }
}

TEST(Mms, LinearSteadyIsReproducedExactly) {
  SimulationConfig cfg;
  cfg.mms.temporal_steps = {4, 8};
  cfg.mms.final_time = 0.2;
  const MmsStudy s = temporal_study(cfg, linear_steady_solution());
  for (const MmsCase& c : s.cases) {
    EXPECT_EQ(c.newton_failures, 0);
    EXPECT_LT(c.errors.velocity, 1e-9);
    EXPECT_LT(c.errors.pressure, 1e-8);
  }
}

TEST(Mms, SpatialOrderOnTwoLevels) {
  SimulationConfig cfg;
  cfg.mms.spatial_levels = {4, 8};
  const MmsStudy s = spatial_study(cfg, trig_steady_solution());
  ASSERT_EQ(s.velocity_order.size(), 1u);
  EXPECT_GE(s.velocity_order[0], 1.7);
  EXPECT_LE(s.velocity_order[0], 2.3);
  EXPECT_NE(format_study({s}).find("kind,solution,dt,steps,h,velocity_l2,pressure_l2"), std::string::npos);
}
