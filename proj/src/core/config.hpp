#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "expression.hpp"
#include "geometry.hpp"

namespace porohom {

enum class MacroMode { automatic, coupled, decoupled };

struct GeometryConfig {
  int dimension = 2;
  InclusionShape inclusion;
  int m = 1;
  int r = 8;
};

struct ScalingConfig {
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 1.0;
  double p = 4.0;
  double final_time = 0.0;
  double dt = 1e-3;               // upper bound on the step
  double output_interval = 0.0;   // <= 0: every step
  double cfl_safety = 0.4;
  double dt_min = 1e-10;
};

struct SpeciesConfig {
  double diffusivity = 1.0;
  int charge = 0;
  Expression initial;
};

struct SurfaceChargeConfig {
  Expression xi1;  // ξ1(x, y)
  Expression xi2;  // ξ2(x)
  bool auto_balance = false;
  /// Constant added to ξ2 by auto-balance on the configured grid.
  double xi2_shift = 0.0;
};

struct SolverConfig {
  double linear_tolerance = 1e-12;
  double poisson_tolerance = 1e-11;
  double cell_tolerance = 1e-10;
  int max_iterations = 20000;
  bool poisson_every_step = false;  // decoupled macro mode only
  bool explicit_time = false;
  MacroMode macro_mode = MacroMode::automatic;
  int macro_resolution = 0;  // 0: m·r
};

struct OutputConfig {
  /// Snapshot every k-th output time; 0 writes only the first and last.
  int snapshot_every = 0;
  bool write_correctors = false;  // `cell`: corrector CSVs
};

struct StudyConfig {
  std::vector<int> m_list;                      // convergence study
  std::vector<int> mms_resolutions{32, 64, 128};
  std::vector<double> eta_list;
};

struct RunConfig {
  GeometryConfig geometry;
  ScalingConfig scaling;
  std::vector<SpeciesConfig> species;
  SurfaceChargeConfig surface;
  SolverConfig solver;
  OutputConfig output;
  StudyConfig study;
  nlohmann::json document;  // normalized echo of the accepted config

  double epsilon() const { return 1.0 / geometry.m; }
  /// Resolved macro mode from α and β.
  MacroMode macro_mode() const;
};

/// Parses a JSON config, applies defaults and checks every assumption that can
/// be checked without solving (α ≤ β, p ≥ 4, η > 0, D_i > 0, c_i^0 ≥ 0, cell
/// geometry, charge compatibility unless auto_balance is set).
RunConfig parse_and_validate(const std::string& text);

/// SHA-256 of the normalized config, hex encoded.
std::string config_hash(const RunConfig& config);

/// Hash of the physical data only (species, charges, exponents, T), used to
/// check that the runs of a study share their data.
std::string physics_hash(const RunConfig& config);

std::string sha256_hex(const std::string& data);

const char* to_string(MacroMode mode);

}  // namespace porohom
