#include "hemo/simulation.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>

#include "hemo/generators.hpp"
#include "hemo/output.hpp"

namespace hemo {

Mesh build_mesh(const MeshSource& source) {
  if (!source.file.empty()) {
    if (source.file.extension() == ".vtk") return import_vtk(source.file);
    return load_mesh(source.file);
  }
  if (source.n_cross < 1 || source.n_axial < 1) throw ConfigError("[mesh]: n_cross and n_axial must be positive");
  if (source.generator == "cylinder") {
    if (!(source.radius > 0.0) || !(source.length > 0.0)) throw ConfigError("[mesh]: radius and length must be positive");
    return cylinder_mesh(source.radius, source.length, source.n_cross, source.n_axial);
  }
  if (source.generator == "nozzle") return nozzle_mesh(source.n_cross, source.n_axial);
  if (source.generator == "box") return box_mesh(source.n_axial, source.n_cross, source.n_cross, source.box);
  throw ConfigError("[mesh] generator: expected cylinder, nozzle or box, got '" + source.generator + "'");
}

Vector unit_inflow_profile(const Mesh& mesh, std::size_t inlet_group, bool normalize) {
  const SurfaceField field = parabolic_inflow(mesh, inlet_group, 1.0);
  std::set<int> wall;
  for (std::size_t g : mesh.groups_with_tag(FacetTag::wall)) {
    for (int a : mesh.group_nodes(g)) wall.insert(a);
  }
  Vector v = Vector::Zero(3 * static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t i = 0; i < field.nodes.size(); ++i) {
    const int a = field.nodes[i];
    if (!wall.count(a)) v.segment<3>(3 * a) = field.values[i];
  }
  if (normalize) {
    const double q = surface_flow_rate(mesh, inlet_group, v);
    if (!(std::abs(q) > 0.0)) throw MeshError("inlet profile carries no flux; the inlet has no interior nodes");
    v *= -1.0 / q;
  }
  return v;
}

double courant_time_step(const Mesh& mesh, double courant, double v_max) {
  if (!(courant > 0.0)) throw ConfigError("Courant number must be positive");
  if (!(v_max > 0.0)) throw ConfigError("cannot derive dt from a zero inflow; set [time] dt");
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) h = std::min(h, circumsphere_diameter(mesh.tet_points(e)));
  return courant * h / v_max;
}

namespace {

double max_abs(const Waveform& w) {
  double m = 0.0;
  for (double x : w.values()) m = std::max(m, std::abs(x));
  return m;
}

// Per-time noise stream: the same (seed, t) always gives the same field.
std::uint64_t mix_seed(std::uint64_t seed, double t) {
  std::uint64_t z = seed ^ (std::bit_cast<std::uint64_t>(t) + 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Simulation::Simulation(const SimulationConfig& config, std::uint64_t seed) : config_(config), seed_(seed) {
  mesh_ = std::make_shared<const Mesh>(build_mesh(config.mesh));
  const Mesh& mesh = *mesh_;

  const std::size_t inlet = mesh.group_index(config.inflow.group);
  if (mesh.groups()[inlet].tag != FacetTag::inlet) {
    throw ConfigError("inflow group '" + config.inflow.group + "' is not tagged inlet");
  }
  // The generic DofMap constrains every inlet and wall group; with a single
  // inlet the Dirichlet function below covers them all.
  if (mesh.groups_with_tag(FacetTag::inlet).size() != 1) throw ConfigError("exactly one inlet group is supported");

  assembler_ = std::make_unique<Assembler>(mesh, DofMap(mesh), config.fluid);
  const std::size_t n_out = assembler_->num_outlets();
  problem_.assembler = assembler_.get();
  problem_.outlets.resize(n_out);
  pi0_.assign(n_out, 0.0);
  std::vector<bool> seen(config.outlets.size(), false);
  for (std::size_t k = 0; k < n_out; ++k) {
    const std::string& name = mesh.groups()[assembler_->outlet_group(k)].name;
    outlet_names_.push_back(name);
    const auto it = std::find_if(config.outlets.begin(), config.outlets.end(),
                                 [&](const OutletConfig& o) { return o.group == name; });
    if (it == config.outlets.end()) throw ConfigError("outlet group '" + name + "' has no [outlet:" + name + "] model");
    seen[static_cast<std::size_t>(it - config.outlets.begin())] = true;
    problem_.outlets[k].model = it->model;
    problem_.outlets[k].subintervals = it->subintervals;
    pi0_[k] = it->pi0;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ConfigError("[outlet:" + config.outlets[i].group + "] names no outlet group of the mesh");
  }

  inflow_ = unit_inflow_profile(mesh, inlet, config.inflow.normalize);
  problem_.ga = genalpha_params(config.rho_inf);
  problem_.newton = config.newton;
  problem_.linear = config.linear;

  dt_ = config.dt;
  if (dt_ == 0.0) dt_ = courant_time_step(mesh, config.courant, inflow_.cwiseAbs().maxCoeff() * max_abs(config.inflow.flow));

  const double sigma = config.inflow.perturbation;
  if (sigma < 0.0) throw ConfigError("[inflow] perturbation must be non-negative");
  const Waveform flow = config.inflow.flow;
  const DofMap* dofs = &assembler_->dofs();
  const Vector* unit = &inflow_;
  const std::uint64_t s = seed_;
  problem_.dirichlet = [flow, sigma, dofs, unit, s](double t, Vector& v) {
    const double q = flow(t);
    for (int node : dofs->constrained_nodes()) v.segment<3>(3 * node) = q * unit->segment<3>(3 * node);
    if (sigma == 0.0) return;
    std::mt19937_64 rng(mix_seed(s, t));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int node : dofs->constrained_nodes()) {
      for (int i = 0; i < 3; ++i) {
        const double base = v(3 * node + i);
        const double xi = noise(rng);
        if (base != 0.0) v(3 * node + i) = base * (1.0 + sigma * xi);
      }
    }
  };
}

KinematicState Simulation::initial_state() const {
  const std::size_t n = mesh_->num_nodes();
  FlowState y = FlowState::zero(n);
  problem_.dirichlet(0.0, y.v);
  return make_initial_state(problem_, std::move(y), FlowState::zero(n), pi0_, 0.0);
}

namespace {

std::string pad_step(int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step_%05d.vtk", step);
  return buf;
}

}  // namespace

RunSummary run_simulation(const SimulationConfig& config, const RunOptions& options) {
  const Simulation sim(config, options.seed.value_or(config.seed));
  const std::size_t n_out = sim.outlet_names().size();

  RunSummary summary;
  summary.dt = sim.dt();
  summary.output_dir = options.output_dir.value_or(config.output_dir);
  const auto& dir = summary.output_dir;

  std::vector<std::string> columns{"step",       "time",           "newton_iterations", "corrections", "converged",
                                   "residual_initial", "residual_final", "linear_iterations"};
  for (const auto& name : sim.outlet_names()) {
    columns.push_back("Q_" + name);
    columns.push_back("P_" + name);
    columns.push_back("P_" + name + "_mmHg");
  }
  CsvWriter steps(columns);
  steps.comment("dt=" + format_double(sim.dt()));
  CsvWriter linear({"step", "newton_iteration", "iteration", "rel_residual"});
  CsvWriter timings({"step", "assembly_seconds", "solve_seconds"});

  const auto flush = [&] {
    steps.save(dir / "steps.csv");
    linear.save(dir / "linear.csv");
    if (!options.deterministic) timings.save(dir / "timings.csv");
  };

  KinematicState state = sim.initial_state();
  try {
    for (int step = 1; step <= config.steps; ++step) {
      TimeStepReport rep = advance_step(sim.problem(), state, sim.dt());
      int lin_its = 0;
      for (std::size_t l = 0; l < rep.linear.size(); ++l) {
        const auto& hist = rep.linear[l].outer.history;
        lin_its += rep.linear[l].outer.iterations;
        for (std::size_t i = 0; i < hist.size(); ++i) {
          linear.row({std::to_string(step), std::to_string(l + 1), std::to_string(i), format_double(hist[i])});
        }
      }
      std::vector<std::string> row{std::to_string(step),
                                   format_double(state.time),
                                   std::to_string(rep.iterations),
                                   std::to_string(rep.corrections),
                                   rep.converged ? "1" : "0",
                                   format_double(rep.residual_norms.front()),
                                   format_double(rep.residual_norms.back()),
                                   std::to_string(lin_its)};
      for (std::size_t k = 0; k < n_out; ++k) {
        row.push_back(format_double(state.flow[k]));
        row.push_back(format_double(state.pressure[k]));
        row.push_back(format_double(state.pressure[k] / kMmHg));
      }
      steps.row(row);
      timings.row({std::to_string(step), format_double(rep.assembly_seconds), format_double(rep.solve_seconds)});
      if (!rep.converged) ++summary.unconverged_steps;
      if (config.vtk_every > 0 && step % config.vtk_every == 0) export_vtk(sim.mesh(), state.y, dir / pad_step(step));
      if (options.on_step) options.on_step(step, state, rep);
      summary.steps = step;
      summary.reports.push_back(std::move(rep));
    }
  } catch (...) {
    flush();
    throw;
  }
  flush();
  export_vtk(sim.mesh(), state.y, dir / "final_state.vtk");
  summary.final_state = std::move(state);
  return summary;
}

}  // namespace hemo
