#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "porofft/effective.hpp"
#include "porofft/field_io.hpp"
#include "porofft/geometry.hpp"
#include "porofft/stokes.hpp"
#include "porofft/transport.hpp"

namespace porofft {

/// Where the indicator comes from.
///
/// Textual forms (see parse_geometry_spec):
///   disk:R[@CX,CY]            centred (or placed) disk
///   ellipse:A,B,ANGLE[@CX,CY] rotated ellipse, angle in degrees
///   random:SEED,COUNT,RMIN,RMAX  reproducible random disks
///   <path>.pgm | <path>.csv   raster file
struct GeometrySpec {
  std::string source = "disk:0.25";
  std::vector<Obstacle> obstacles{Disk{}};
  bool random = false;
  std::uint64_t seed = 0;
  int count = 0;
  double r_min = 0.0, r_max = 0.0;
  std::optional<std::filesystem::path> raster;
  double threshold = 0.5;
  /// Model geometries are rasterized at this resolution; rasters are
  /// resampled only when it is set explicitly.
  std::optional<int> resolution;
};

GeometrySpec parse_geometry_spec(const std::string& s);
IndicatorField build_geometry(const GeometrySpec& g);

/// Parameters that a sweep may vary.
struct SweepSpec {
  std::string param;  ///< alpha|beta|b|a0|b0|eta|pe|tol|resolution
  std::vector<double> values;
};

SweepSpec parse_sweep_spec(const std::string& s);

struct RunConfig {
  GeometrySpec geometry;
  StokesConfig stokes;
  TransportConfig transport;
  /// Penalty schedule; unset values fall back to the schedule's defaults
  /// (nu / h^2 when fixed, 1 when adaptive).
  bool adaptive = false;
  std::optional<double> alpha, beta, b;
  bool run_transport = true;

  std::filesystem::path out_dir;  ///< empty: nothing is written
  bool write_fields = true;
  std::vector<FieldFormat> field_formats{FieldFormat::Csv};
  bool write_histories = true;

  std::optional<SweepSpec> sweep;
  int jobs = 1;  ///< concurrent sweep entries

  void validate() const;
  PenaltyParams penalties_for(const UnitCellGrid& grid) const;
};

struct FlowRun {
  std::vector<double> g_p;
  StokesResult result;
  double seconds = 0.0;
};

struct TransportRun {
  std::vector<double> g_chi;
  TransportResult result;
  double seconds = 0.0;
};

struct RunReport {
  RunConfig config;
  double porosity = 0.0;
  std::vector<FlowRun> unit_flows;      ///< g_p = e_i
  std::optional<FlowRun> driven_flow;   ///< cfg g_p, when it is not a unit vector
  std::vector<TransportRun> transports; ///< g_chi = e_j under the driven flow
  std::string transport_skipped;        ///< reason, empty when transport ran
  EffectiveTensors tensors;
  std::map<std::string, double> timing;

  bool stokes_converged() const;
  bool transport_converged() const;
  bool converged() const { return stokes_converged() && transport_converged(); }
  /// Flow the transport problems were solved under.
  const FlowRun& transport_flow() const;
};

/// Geometry -> d unit Stokes solves (+ the driven flow) -> d transport solves
/// -> effective tensors; writes the requested artifacts into out_dir.
RunReport run(const RunConfig& cfg);

/// 0 converged, 2 not converged (usage errors map to 1 in the CLI).
int exit_code(const RunReport& r);

inline constexpr int kReportSchemaVersion = 1;

/// Machine-readable report. Timing data is only included when asked for,
/// so that reports of identical runs compare equal.
std::string report_json(const RunReport& r, bool include_timing = true);

struct SweepRow {
  double value = 0.0;
  int stokes_iterations = 0;
  bool stokes_converged = false;
  int transport_iterations = 0;
  std::string transport_status;
  double k11 = 0.0, k22 = 0.0, d11 = 0.0, d22 = 0.0;
};

/// Runs cfg once per sweep value (cfg.sweep must be set). Results are in
/// sweep order regardless of cfg.jobs. Writes sweep.csv when out_dir is set.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);

void write_stokes_history(const StokesReport& r, const std::filesystem::path& path);
void write_transport_history(const TransportReport& r, const std::filesystem::path& path);

}  // namespace porofft
