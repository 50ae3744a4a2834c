// hemo command line front end.

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>

#include "hemo/bench.hpp"
#include "hemo/config.hpp"
#include "hemo/generators.hpp"
#include "hemo/mms.hpp"
#include "hemo/output.hpp"
#include "hemo/simulation.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct Globals {
  bool deterministic = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::string log_level = "info";
};

std::optional<std::filesystem::path> as_path(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return std::filesystem::path(*s);
}

int cmd_run(const std::string& path, const Globals& g) {
  const hemo::SimulationConfig cfg = hemo::load_config(path);
  hemo::RunOptions opt;
  opt.deterministic = g.deterministic;
  opt.seed = g.seed;
  opt.output_dir = as_path(g.output_dir);
  opt.on_step = [](int step, const hemo::KinematicState& s, const hemo::TimeStepReport& r) {
    int lin = 0;
    for (const auto& l : r.linear) lin += l.outer.iterations;
    std::string outlets;
    for (std::size_t k = 0; k < s.flow.size(); ++k) {
      outlets += fmt::format(" Q{}={:.6g} P{}={:.6g}", k, s.flow[k], k, s.pressure[k]);
    }
    spdlog::info("step {:4d} t={:.5g} newton={} linear={} |R|={:.3e}{}{}", step, s.time, r.iterations, lin,
                 r.residual_norms.back(), outlets, r.converged ? "" : " NOT CONVERGED");
  };
  const hemo::RunSummary sum = hemo::run_simulation(cfg, opt);
  spdlog::info("{} steps with dt={:.6g}; artifacts in {}", sum.steps, sum.dt, sum.output_dir.string());
  if (sum.unconverged_steps > 0) {
    spdlog::error("{} step(s) did not converge", sum.unconverged_steps);
    return kExitNotConverged;
  }
  return 0;
}

int cmd_mms(const std::string& path, const std::string& kind, const std::string& temporal_name,
            const std::string& spatial_name, const Globals& g) {
  const hemo::SimulationConfig cfg = hemo::load_config(path);
  std::vector<hemo::MmsStudy> studies;
  if (kind == "temporal" || kind == "both") {
    studies.push_back(hemo::temporal_study(cfg, hemo::exact_solution_by_name(temporal_name)));
  }
  if (kind == "spatial" || kind == "both") {
    studies.push_back(hemo::spatial_study(cfg, hemo::exact_solution_by_name(spatial_name)));
  }
  int failures = 0;
  for (const auto& s : studies) {
    for (std::size_t i = 0; i < s.cases.size(); ++i) {
      const auto& c = s.cases[i];
      failures += c.newton_failures;
      std::string orders;
      if (i > 0) orders = fmt::format("  order v={:.3f} p={:.3f}", s.velocity_order[i - 1], s.pressure_order[i - 1]);
      spdlog::info("{} {} dt={:.4g} h={:.4g} |e_v|={:.4e} |e_p|={:.4e}{}", s.kind, s.solution, c.dt, c.h,
                   c.errors.velocity, c.errors.pressure, orders);
    }
  }
  const std::filesystem::path dir = as_path(g.output_dir).value_or(cfg.output_dir);
  hemo::write_file_atomic(dir / "mms.csv", hemo::format_study(studies));
  spdlog::info("table written to {}", (dir / "mms.csv").string());
  return failures > 0 ? kExitNotConverged : 0;
}

int cmd_bench(const std::string& path, const Globals& g) {
  const hemo::SimulationConfig cfg = hemo::load_config(path);
  hemo::BenchOptions opt;
  opt.deterministic = g.deterministic;
  opt.seed = g.seed;
  opt.output_dir = as_path(g.output_dir);
  const auto cases = hemo::benchmark_preconditioners(cfg, opt);
  for (const auto& c : cases) {
    spdlog::info("R={:<8g} {:<10} dI={:<6} its={:<4} rel={:.3e} {}", c.resistance, hemo::to_string(c.precond),
                 c.inner_rtol > 0.0 ? fmt::format("{:g}", c.inner_rtol) : "-", c.report.outer.iterations,
                 c.report.outer.relative_residual, c.report.outer.converged ? "converged" : "NC");
  }
  return 0;
}

hemo::Mesh read_any_mesh(const std::string& path) {
  const std::filesystem::path p(path);
  return p.extension() == ".vtk" ? hemo::import_vtk(p) : hemo::load_mesh(p);
}

int cmd_mesh_info(const std::string& path) {
  const hemo::Mesh mesh = read_any_mesh(path);
  double hmin = std::numeric_limits<double>::infinity(), hmax = 0.0;
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) {
    const double h = hemo::circumsphere_diameter(mesh.tet_points(e));
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
  }
  std::cout << "nodes " << mesh.num_nodes() << "\ntets " << mesh.num_tets() << "\nvolume "
            << hemo::format_double(mesh.total_volume()) << "\nh_min " << hemo::format_double(hmin) << "\nh_max "
            << hemo::format_double(hmax) << '\n';
  for (std::size_t g = 0; g < mesh.groups().size(); ++g) {
    const auto& grp = mesh.groups()[g];
    const hemo::SurfacePlane plane = hemo::fit_plane(mesh, g);
    std::cout << "group " << grp.name << ' ' << hemo::to_string(grp.tag) << " triangles " << grp.triangles.size()
              << " area " << hemo::format_double(plane.area) << '\n';
  }
  return 0;
}

int cmd_mesh_gen(const hemo::MeshSource& src, const std::string& out) {
  const hemo::Mesh mesh = hemo::build_mesh(src);
  hemo::save_mesh(mesh, out);
  spdlog::info("{} nodes, {} tets written to {}", mesh.num_nodes(), mesh.num_tets(), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hemo: incompressible flow solver with reduced-model outlets"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_flag("--deterministic", g.deterministic, "Skip wall-clock dependent outputs");
  app.add_option("--seed", g.seed, "Seed for the inflow perturbation");
  app.add_option("--output-dir", g.output_dir, "Override the output directory");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::string config;
  auto* run = app.add_subcommand("run", "Time-march a configured problem");
  run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  auto* mms = app.add_subcommand("mms", "Manufactured-solution convergence study");
  std::string kind = "both", temporal = "linear-transient", spatial = "trig-steady";
  mms->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  mms->add_option("--kind", kind, "temporal, spatial or both")->check(CLI::IsMember({"temporal", "spatial", "both"}));
  mms->add_option("--temporal-solution", temporal, "linear-transient or linear-steady");
  mms->add_option("--spatial-solution", spatial, "trig-steady or linear-steady");

  auto* bench = app.add_subcommand("bench", "Preconditioner comparison on frozen Newton systems");
  bench->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  std::string mesh_path;
  auto* info = app.add_subcommand("mesh-info", "Print mesh statistics");
  info->add_option("mesh", mesh_path, "Mesh file (.msh text or legacy .vtk)")->required()->check(CLI::ExistingFile);

  hemo::MeshSource src;
  std::string out;
  std::vector<double> box;
  auto* gen = app.add_subcommand("mesh-gen", "Write a generated fixture mesh");
  gen->add_option("generator", src.generator, "cylinder, nozzle or box")
      ->required()
      ->check(CLI::IsMember({"cylinder", "nozzle", "box"}));
  gen->add_option("-o,--output", out, "Output mesh file")->required();
  gen->add_option("--radius", src.radius);
  gen->add_option("--length", src.length);
  gen->add_option("--n-cross", src.n_cross);
  gen->add_option("--n-axial", src.n_axial);
  gen->add_option("--box", box, "Box lengths")->expected(3);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(g.log_level));
  if (!box.empty()) src.box = hemo::Vec3(box[0], box[1], box[2]);

  try {
    if (*run) return cmd_run(config, g);
    if (*mms) return cmd_mms(config, kind, temporal, spatial, g);
    if (*bench) return cmd_bench(config, g);
    if (*info) return cmd_mesh_info(mesh_path);
    if (*gen) return cmd_mesh_gen(src, out);
  } catch (const hemo::SolverError& e) {
    spdlog::error("solver failure: {}", e.what());
    return kExitNotConverged;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
  return kExitError;
}
