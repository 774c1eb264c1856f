// porofft: effective permeability and dispersion tensors of periodic cells.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "porofft/error.hpp"
#include "porofft/field_io.hpp"
#include "porofft/parallel.hpp"
#include "porofft/raster_io.hpp"
#include "porofft/run.hpp"

namespace {

constexpr int kUsageError = 1;

struct Options {
  std::string geometry = "disk:0.25";
  double threshold = 0.5;
  int resolution = 0;
  double nu = 1.0;
  std::vector<double> gp{1.0, 0.0};
  double pe = 0.0, eta = 0.01, a0 = 0.55, b0 = 1.0;
  std::vector<double> b0_vector;
  double tol = 1e-5;
  double stokes_eps_abs = 0.0, stokes_eps_rel = 0.0, transport_eps = 0.0;
  int max_iter = 10000;
  bool adaptive = false;
  double alpha = 0.0, beta = 0.0, b = 0.0;
  std::string symbol_mode = "central", transport_symbol_mode = "central";
  bool no_transport = false;
  std::string out_dir;
  std::vector<std::string> fields{"csv"};
  bool no_histories = false;
  std::string sweep;
  int jobs = 1;
  bool quiet = false;
};

void add_geometry_options(CLI::App& app, Options& o) {
  app.add_option("-g,--geometry", o.geometry,
                 "disk:R[@CX,CY] | ellipse:A,B,DEG[@CX,CY] | random:SEED,COUNT,RMIN,RMAX | file.pgm | file.csv")
      ->capture_default_str();
  app.add_option("--threshold", o.threshold, "raster value at or above which a cell is solid")->capture_default_str();
  app.add_option("-n,--resolution", o.resolution, "cells per axis (model geometries default to 128)");
}

porofft::RunConfig to_config(const Options& o) {
  porofft::RunConfig c;
  c.geometry = porofft::parse_geometry_spec(o.geometry);
  c.geometry.threshold = o.threshold;
  if (o.resolution > 0) c.geometry.resolution = o.resolution;

  c.stokes.nu = o.nu;
  c.stokes.g_p = o.gp;
  c.stokes.eps_abs = o.stokes_eps_abs > 0 ? o.stokes_eps_abs : o.tol;
  c.stokes.eps_rel = o.stokes_eps_rel > 0 ? o.stokes_eps_rel : o.tol;
  c.stokes.max_iter = o.max_iter;
  c.stokes.symbol_mode = porofft::parse_symbol_mode(o.symbol_mode);

  c.transport.pe = o.pe;
  c.transport.eta = o.eta;
  c.transport.a0 = o.a0;
  c.transport.b0 = o.b0;
  if (!o.b0_vector.empty()) c.transport.b0_vector = o.b0_vector;
  c.transport.eps = o.transport_eps > 0 ? o.transport_eps : o.tol;
  c.transport.max_iter = o.max_iter;
  c.transport.symbol_mode = porofft::parse_symbol_mode(o.transport_symbol_mode);
  c.run_transport = !o.no_transport;

  c.adaptive = o.adaptive;
  if (o.alpha > 0) c.alpha = o.alpha;
  if (o.beta > 0) c.beta = o.beta;
  if (o.b > 0) c.b = o.b;

  c.out_dir = o.out_dir;
  c.field_formats.clear();
  for (const auto& f : o.fields) {
    if (f == "none") continue;
    c.field_formats.push_back(porofft::parse_field_format(f));
  }
  c.write_fields = !c.field_formats.empty();
  c.write_histories = !o.no_histories;
  if (!o.sweep.empty()) c.sweep = porofft::parse_sweep_spec(o.sweep);
  c.jobs = o.jobs;
  return c;
}

void print_tensor(const char* name, const porofft::Tensor& t) {
  for (int i = 0; i < t.dim; ++i) {
    std::printf("%s%d:", name, i + 1);
    for (int j = 0; j < t.dim; ++j) std::printf(" % .10e", t(i, j));
    std::printf("\n");
  }
}

int do_run(const Options& o) {
  const porofft::RunConfig cfg = to_config(o);
  if (cfg.sweep) {
    const auto rows = porofft::run_sweep(cfg);
    std::printf("%s,stokes_iter,stokes_converged,transport_iter,transport_status,K11,K22,D11,D22\n",
                cfg.sweep->param.c_str());
    bool ok = true;
    for (const auto& r : rows) {
      std::printf("%.6g,%d,%d,%d,%s,%.10e,%.10e,%.10e,%.10e\n", r.value, r.stokes_iterations,
                  r.stokes_converged ? 1 : 0, r.transport_iterations, r.transport_status.c_str(), r.k11, r.k22,
                  r.d11, r.d22);
      ok = ok && r.stokes_converged && (r.transport_status == "converged" || r.transport_status == "skipped");
    }
    return ok ? 0 : 2;
  }
  const porofft::RunReport rep = porofft::run(cfg);
  if (!o.quiet) {
    std::printf("porosity: %.10f\n", rep.porosity);
    for (const auto& f : rep.unit_flows) {
      std::printf("stokes: %s after %d iterations (%s)\n", f.result.report.converged ? "converged" : "NOT converged",
                  f.result.report.iterations, f.result.report.message.c_str());
    }
    if (rep.driven_flow) {
      const auto& r = rep.driven_flow->result.report;
      std::printf("driven flow: %s after %d iterations\n", r.converged ? "converged" : "NOT converged", r.iterations);
    }
    if (!rep.transport_skipped.empty()) std::printf("transport: skipped (%s)\n", rep.transport_skipped.c_str());
    for (const auto& t : rep.transports) {
      std::printf("transport: %s after %d iterations\n", std::string(porofft::to_string(t.result.report.status)).c_str(),
                  t.result.report.iterations);
    }
    print_tensor("K", rep.tensors.K);
    if (rep.tensors.D) print_tensor("D", *rep.tensors.D);
    if (!cfg.out_dir.empty()) std::printf("wrote %s\n", (cfg.out_dir / "report.json").c_str());
  }
  return porofft::exit_code(rep);
}

int do_geometry(const Options& o, const std::string& out) {
  porofft::GeometrySpec g = porofft::parse_geometry_spec(o.geometry);
  g.threshold = o.threshold;
  if (o.resolution > 0) g.resolution = o.resolution;
  const auto h = porofft::build_geometry(g);
  porofft::write_indicator(h, out);
  std::printf("porosity: %.10f\n", porofft::porosity(h));
  return 0;
}

// Command-line tokens for the config entries whose options were not set on the command line.
std::vector<std::string> config_args(CLI::App& run, const std::string& path) {
  if (!std::filesystem::exists(path)) throw porofft::ConfigError("config file not found: " + path);
  std::vector<std::string> out;
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "run"))
      throw porofft::ConfigError("unknown config section for key " + item.fullname());
    if (item.name == "config") throw porofft::ConfigError("config files cannot include other config files");
    CLI::Option* opt = run.get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw porofft::ConfigError("unknown config key '" + item.name + "'");
    if (opt->count() > 0) continue;
    if (opt->get_expected_min() == 0) {
      const std::string v = item.inputs.empty() ? "true" : item.inputs.front();
      if (v == "true" || v == "1" || v == "on" || v == "yes") out.push_back("--" + item.name);
      continue;
    }
    out.push_back("--" + item.name);
    for (const auto& v : item.inputs) out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  porofft::configure_threads_from_env();
  CLI::App app{"Spectral extended-domain solver for periodic porous cells"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "solve the cell problems and report K (and D)");
  std::string config_path;
  run->add_option("--config", config_path, "key = value file (INI/TOML) with option values; flags win");
  add_geometry_options(*run, o);
  run->add_option("--nu", o.nu, "fluid viscosity")->capture_default_str();
  run->add_option("--gp", o.gp, "pressure gradient of the flow that drives transport")->expected(2, 3);
  run->add_option("--pe", o.pe, "Peclet number")->capture_default_str();
  run->add_option("--eta", o.eta, "fictitious diffusivity in the solid")->capture_default_str();
  run->add_option("--a0", o.a0, "comparison diffusivity")->capture_default_str();
  run->add_option("--b0", o.b0, "comparison advection magnitude (along the mean flow)")->capture_default_str();
  run->add_option("--b0-vector", o.b0_vector, "explicit comparison advection vector")->expected(2, 3);
  run->add_option("--tol", o.tol, "tolerance for both solvers")->capture_default_str();
  run->add_option("--eps-abs", o.stokes_eps_abs, "Stokes absolute tolerance (overrides --tol)");
  run->add_option("--eps-rel", o.stokes_eps_rel, "Stokes relative tolerance (overrides --tol)");
  run->add_option("--transport-eps", o.transport_eps, "transport tolerance (overrides --tol)");
  run->add_option("--max-iter", o.max_iter, "iteration cap for each solve")->capture_default_str();
  run->add_flag("--adaptive", o.adaptive, "residual-balancing penalty schedule");
  run->add_option("--alpha", o.alpha, "solid penalty (fixed)");
  run->add_option("--beta", o.beta, "incompressibility penalty (fixed)");
  run->add_option("--b", o.b, "splitting penalty (fixed)");
  run->add_option("--symbol-mode", o.symbol_mode, "Stokes derivative symbols: exact|central")->capture_default_str();
  run->add_option("--transport-symbol-mode", o.transport_symbol_mode, "transport derivative symbols: exact|central")
      ->capture_default_str();
  run->add_flag("--no-transport", o.no_transport, "only solve the Stokes problems");
  run->add_option("-o,--out-dir", o.out_dir, "directory for report.json, fields and histories");
  run->add_option("--fields", o.fields, "field formats: csv, vtk or none")->capture_default_str();
  run->add_flag("--no-histories", o.no_histories, "do not write residual histories");
  run->add_option("--sweep", o.sweep, "PARAM=v1,v2,... with PARAM in alpha|beta|b|a0|b0|eta|pe|tol|resolution");
  run->add_option("-j,--jobs", o.jobs, "concurrent sweep entries")->capture_default_str();
  run->add_flag("-q,--quiet", o.quiet, "no summary on stdout");

  std::string geom_out;
  auto* geo = app.add_subcommand("geometry", "rasterize a geometry to an indicator file");
  add_geometry_options(*geo, o);
  geo->add_option("-o,--output", geom_out, "output .pgm or .csv")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed() && !config_path.empty()) {
      // Re-parse with the file's values appended for options not given as flags.
      std::vector<std::string> args(argv + 1, argv + argc);
      for (auto& a : config_args(*run, config_path)) args.push_back(std::move(a));
      std::reverse(args.begin(), args.end());
      app.parse(args);
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (run->parsed()) return do_run(o);
    return do_geometry(o, geom_out);
  } catch (const porofft::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const porofft::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const porofft::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kUsageError;
}
