#ifndef HEMO_CONFIG_HPP
#define HEMO_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hemo/assembly.hpp"
#include "hemo/lumped.hpp"
#include "hemo/precond.hpp"
#include "hemo/timestep.hpp"

namespace hemo {

/// Where the mesh comes from: a file, or one of the built-in generators.
struct MeshSource {
  std::filesystem::path file;
  std::string generator;  ///< cylinder | nozzle | box (when file is empty)
  double radius = 2.0;
  double length = 30.0;
  Vec3 box{1.0, 1.0, 1.0};
  int n_cross = 4;
  int n_axial = 30;
};

struct InflowConfig {
  std::string group = "inlet";
  Waveform flow{0.0};
  /// Relative standard deviation of the seeded inlet noise (0 = off).
  double perturbation = 0.0;
  /// Rescale the profile so the discrete inlet flux equals the prescribed Q.
  bool normalize = true;
};

struct OutletConfig {
  std::string group;
  LumpedModel model;
  double pi0 = 0.0;
  int subintervals = kDefaultSubintervals;
};

struct BenchConfig {
  std::vector<double> resistances{1e2, 1e3, 1e4, 1e5};
  std::vector<BlockPrecond> preconditioners{BlockPrecond::scr, BlockPrecond::simple};
  std::vector<double> inner_tolerances{1e-1, 1e-2, 1e-3, 1e-4};
  int warmup_steps = 3;
};

struct MmsConfig {
  std::vector<int> temporal_steps{8, 16, 32, 64};
  double final_time = 0.5;
  int temporal_mesh = 2;
  std::vector<int> spatial_levels{4, 8, 16};
  double spatial_dt = 1e3;
  int spatial_steps = 3;
};

struct SimulationConfig {
  MeshSource mesh;
  FlowParams fluid;
  InflowConfig inflow;
  std::vector<OutletConfig> outlets;

  double dt = 0.0;       ///< 0 means derive from the Courant number
  double courant = 1.0;
  int steps = 10;
  double rho_inf = 0.5;

  NewtonSettings newton;
  LinearSolverConfig linear;

  std::filesystem::path output_dir = "out";
  int vtk_every = 0;  ///< 0 writes only the final state
  std::uint64_t seed = 0;

  BenchConfig bench;
  MmsConfig mms;
};

/// INI-style text: `[section]` headers and `key = value` lines. Relative
/// paths are resolved against `base_dir`. Unknown sections or keys are
/// rejected with ConfigError.
SimulationConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
SimulationConfig load_config(const std::filesystem::path& path);

}  // namespace hemo

#endif  // HEMO_CONFIG_HPP
