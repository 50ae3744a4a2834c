#include "hemo/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hemo {

namespace {

using boost::property_tree::ptree;

class Section {
 public:
  Section(std::string name, const ptree& tree, std::set<std::string> allowed)
      : name_(std::move(name)), tree_(tree) {
    for (const auto& [key, child] : tree) {
      if (!allowed.count(key)) throw ConfigError("[" + name_ + "]: unknown key '" + key + "'");
      if (!child.empty()) throw ConfigError("[" + name_ + "]: nested key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = tree_.find(key);
    return it == tree_.not_found() ? fallback : it->second.data();
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return to_number(key, text(key, ""));
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key, 0.0);
    if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError(where(key) + ": expected an integer");
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = text(key, "");
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(where(key) + ": expected true or false");
  }

  std::vector<std::string> words(const std::string& key) const {
    std::string v = text(key, "");
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream in(v);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& w : words(key)) out.push_back(to_number(key, w));
    if (out.empty()) throw ConfigError(where(key) + ": empty list");
    return out;
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

 private:
  double to_number(const std::string& key, const std::string& s) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(where(key) + ": '" + s + "' is not a number");
    }
  }

  std::string name_;
  const ptree& tree_;
};

const ptree kEmpty;

const ptree& child(const ptree& root, const std::string& name) {
  const auto it = root.find(name);
  return it == root.not_found() ? kEmpty : it->second;
}

void read_solver(const Section& s, SolverSettings& out) {
  out.rtol = s.number("rtol", out.rtol);
  out.atol = s.number("atol", out.atol);
  out.restart = s.integer("restart", out.restart);
  out.max_iterations = s.integer("max_iterations", out.max_iterations);
  try {
    out.validate();
  } catch (const SolverError& e) {
    throw ConfigError(std::string(e.what()));
  }
}

Waveform read_distal(const Section& s) { return Waveform(s.number("distal_pressure", 0.0)); }

}  // namespace

SimulationConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ptree root;
  try {
    std::istringstream in{std::string(text)};
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  static const std::set<std::string> kSections{"mesh",     "fluid",    "inflow",       "time",
                                               "newton",   "solver",   "solver.a",     "solver.s",
                                               "solver.inner", "output", "run",        "bench",
                                               "mms"};
  const auto check_section = [](const std::string& name) {
    if (!kSections.count(name) && name.rfind("outlet:", 0) != 0) {
      throw ConfigError("unknown section [" + name + "]");
    }
  };
  for (const auto& [name, tree] : root) {
    if (tree.empty() && !tree.data().empty()) throw ConfigError("key '" + name + "' outside of a section");
    check_section(name);
  }
  // the ini reader drops empty sections, so headers are checked on the raw text too
  {
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos || line[b] != '[') continue;
      const auto e = line.find(']', b);
      if (e != std::string::npos) check_section(line.substr(b + 1, e - b - 1));
    }
  }

  SimulationConfig cfg;
  const auto resolve = [&base_dir](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  {
    const Section s("mesh", child(root, "mesh"),
                    {"file", "generator", "radius", "length", "box", "n_cross", "n_axial"});
    if (s.has("file")) cfg.mesh.file = resolve(s.text("file", ""));
    cfg.mesh.generator = s.text("generator", cfg.mesh.file.empty() ? "cylinder" : "");
    if (!cfg.mesh.file.empty() && !cfg.mesh.generator.empty()) {
      throw ConfigError("[mesh]: give either file or generator, not both");
    }
    cfg.mesh.radius = s.number("radius", cfg.mesh.radius);
    cfg.mesh.length = s.number("length", cfg.mesh.length);
    if (s.has("box")) {
      const auto b = s.numbers("box", {});
      if (b.size() != 3) throw ConfigError("[mesh] box: expected three lengths");
      cfg.mesh.box = Vec3(b[0], b[1], b[2]);
    }
    cfg.mesh.n_cross = s.integer("n_cross", cfg.mesh.n_cross);
    cfg.mesh.n_axial = s.integer("n_axial", cfg.mesh.n_axial);
  }
  {
    const Section s("fluid", child(root, "fluid"), {"density", "viscosity", "backflow_beta", "stabilization"});
    cfg.fluid.density = s.number("density", cfg.fluid.density);
    cfg.fluid.viscosity = s.number("viscosity", cfg.fluid.viscosity);
    cfg.fluid.backflow_beta = s.number("backflow_beta", cfg.fluid.backflow_beta);
    cfg.fluid.stabilization = s.flag("stabilization", true);
    if (!(cfg.fluid.density > 0.0) || !(cfg.fluid.viscosity > 0.0)) {
      throw ConfigError("[fluid]: density and viscosity must be positive");
    }
  }
  {
    const Section s("inflow", child(root, "inflow"),
                    {"group", "type", "flow", "ramp_time", "times", "values", "periodic", "perturbation",
                     "normalize"});
    cfg.inflow.group = s.text("group", "inlet");
    const std::string type = s.text("type", "constant");
    if (type == "constant") {
      cfg.inflow.flow = Waveform(s.number("flow", 0.0));
    } else if (type == "ramped") {
      cfg.inflow.flow = Waveform::ramped(s.number("flow", 0.0), s.number("ramp_time", 0.0));
    } else if (type == "table") {
      cfg.inflow.flow = Waveform::table(s.numbers("times", {}), s.numbers("values", {}), s.flag("periodic", false));
    } else {
      throw ConfigError("[inflow] type: expected constant, ramped or table");
    }
    cfg.inflow.perturbation = s.number("perturbation", 0.0);
    cfg.inflow.normalize = s.flag("normalize", true);
  }
  for (const auto& [name, tree] : root) {
    if (name.rfind("outlet:", 0) != 0) continue;
    const Section s(name, tree,
                    {"type", "resistance", "proximal", "capacitance", "distal", "distal_pressure", "pi0",
                     "subintervals"});
    OutletConfig oc;
    oc.group = name.substr(7);
    const std::string type = s.text("type", "resistance");
    if (type == "resistance") {
      oc.model = Resistance{s.number("resistance", 0.0), read_distal(s)};
    } else if (type == "rcr") {
      oc.model = Windkessel{s.number("proximal", 0.0), s.number("capacitance", 1.0), s.number("distal", 0.0),
                            read_distal(s)};
    } else {
      throw ConfigError("[" + name + "] type: expected resistance or rcr");
    }
    validate(oc.model);
    oc.pi0 = s.number("pi0", 0.0);
    oc.subintervals = s.integer("subintervals", kDefaultSubintervals);
    if (oc.subintervals < 1) throw ConfigError("[" + name + "] subintervals must be at least 1");
    cfg.outlets.push_back(std::move(oc));
  }
  {
    const Section s("time", child(root, "time"), {"dt", "courant", "steps", "rho_inf"});
    cfg.dt = s.number("dt", 0.0);
    cfg.courant = s.number("courant", 1.0);
    cfg.steps = s.integer("steps", cfg.steps);
    cfg.rho_inf = s.number("rho_inf", cfg.rho_inf);
    if (cfg.dt < 0.0 || !(cfg.courant > 0.0) || cfg.steps < 0) throw ConfigError("[time]: invalid values");
    genalpha_params(cfg.rho_inf);
  }
  {
    const Section s("newton", child(root, "newton"),
                    {"tol_r", "tol_a", "max_iterations", "divergence_factor", "abort_on_failure"});
    cfg.newton.tol_r = s.number("tol_r", cfg.newton.tol_r);
    cfg.newton.tol_a = s.number("tol_a", cfg.newton.tol_a);
    cfg.newton.max_iterations = s.integer("max_iterations", cfg.newton.max_iterations);
    cfg.newton.divergence_factor = s.number("divergence_factor", cfg.newton.divergence_factor);
    cfg.newton.abort_on_failure = s.flag("abort_on_failure", false);
    cfg.newton.validate();
  }
  {
    const Section s("solver", child(root, "solver"),
                    {"preconditioner", "rtol", "atol", "restart", "max_iterations", "direct"});
    read_solver(s, cfg.linear.outer);
    cfg.linear.precond = parse_block_precond(s.text("preconditioner", "scr"));
    cfg.linear.direct = s.flag("direct", false);
  }
  {
    const Section s("solver.a", child(root, "solver.a"), {"preconditioner", "rtol", "atol", "restart", "max_iterations"});
    read_solver(s, cfg.linear.nested.a);
    cfg.linear.nested.pa = parse_a_precond(s.text("preconditioner", "jacobi"));
  }
  {
    const Section s("solver.s", child(root, "solver.s"), {"preconditioner", "rtol", "atol", "restart", "max_iterations"});
    read_solver(s, cfg.linear.nested.s);
    cfg.linear.nested.ps = parse_s_precond(s.text("preconditioner", "ilu0"));
  }
  {
    const Section s("solver.inner", child(root, "solver.inner"), {"rtol", "atol", "restart", "max_iterations"});
    read_solver(s, cfg.linear.nested.inner);
  }
  {
    const Section s("output", child(root, "output"), {"directory", "vtk_every"});
    if (s.has("directory")) cfg.output_dir = resolve(s.text("directory", ""));
    cfg.vtk_every = s.integer("vtk_every", 0);
  }
  {
    const Section s("run", child(root, "run"), {"seed"});
    const double seed = s.number("seed", 0.0);
    if (seed < 0.0) throw ConfigError("[run] seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  {
    const Section s("bench", child(root, "bench"),
                    {"resistances", "preconditioners", "inner_tolerances", "warmup_steps"});
    cfg.bench.resistances = s.numbers("resistances", cfg.bench.resistances);
    if (s.has("preconditioners")) {
      cfg.bench.preconditioners.clear();
      for (const auto& w : s.words("preconditioners")) cfg.bench.preconditioners.push_back(parse_block_precond(w));
    }
    cfg.bench.inner_tolerances = s.numbers("inner_tolerances", cfg.bench.inner_tolerances);
    cfg.bench.warmup_steps = s.integer("warmup_steps", cfg.bench.warmup_steps);
  }
  {
    const Section s("mms", child(root, "mms"),
                    {"temporal_steps", "final_time", "temporal_mesh", "spatial_levels", "spatial_dt", "spatial_steps"});
    if (s.has("temporal_steps")) {
      cfg.mms.temporal_steps.clear();
      for (double v : s.numbers("temporal_steps", {})) cfg.mms.temporal_steps.push_back(static_cast<int>(v));
    }
    cfg.mms.final_time = s.number("final_time", cfg.mms.final_time);
    cfg.mms.temporal_mesh = s.integer("temporal_mesh", cfg.mms.temporal_mesh);
    if (s.has("spatial_levels")) {
      cfg.mms.spatial_levels.clear();
      for (double v : s.numbers("spatial_levels", {})) cfg.mms.spatial_levels.push_back(static_cast<int>(v));
    }
    cfg.mms.spatial_dt = s.number("spatial_dt", cfg.mms.spatial_dt);
    cfg.mms.spatial_steps = s.integer("spatial_steps", cfg.mms.spatial_steps);
  }
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace hemo
