#include "porofft/run.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "porofft/error.hpp"
#include "porofft/raster_io.hpp"

namespace porofft {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> parse_numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("malformed number '" + tok + "' in " + what);
    }
  }
  return out;
}

std::vector<double> unit_vector(int d, int i) {
  std::vector<double> e(static_cast<std::size_t>(d), 0.0);
  e[static_cast<std::size_t>(i)] = 1.0;
  return e;
}

int unit_index(const std::vector<double>& v) {
  int found = -1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 1.0 && found < 0) {
      found = static_cast<int>(i);
    } else if (v[i] != 0.0) {
      return -1;
    }
  }
  return found;
}

FlowRun solve_flow(const IndicatorField& h, const RunConfig& cfg, const PenaltyParams& pen, std::vector<double> g) {
  StokesConfig sc = cfg.stokes;
  sc.g_p = g;
  const auto t0 = Clock::now();
  StokesSolver solver(h, sc);
  FlowRun f{std::move(g), solver.solve(pen), 0.0};
  f.seconds = seconds_since(t0);
  return f;
}

void solve_flows(const IndicatorField& h, const RunConfig& cfg, RunReport& rep) {
  const int d = h.grid().dim();
  const PenaltyParams pen = cfg.penalties_for(h.grid());
  for (int i = 0; i < d; ++i) rep.unit_flows.push_back(solve_flow(h, cfg, pen, unit_vector(d, i)));
  if (unit_index(cfg.stokes.g_p) < 0) rep.driven_flow = solve_flow(h, cfg, pen, cfg.stokes.g_p);

  const SpectralSymbols sym(h.grid(), cfg.stokes.symbol_mode);
  const FourierTransform fft(h.grid());
  std::vector<VectorField> us;
  for (const auto& f : rep.unit_flows) us.push_back(f.result.state.u);
  rep.tensors.K = permeability(us, h, sym, fft);
  rep.tensors.porosity = porosity(h);
  rep.tensors.u_bar.clear();
  if (h.pore_count() > 0) {
    for (const auto& u : us) rep.tensors.u_bar.push_back(pore_average(u, h));
  }
  auto& m = rep.tensors.meta;
  m.nu = cfg.stokes.nu;
  m.stokes_eps_abs = cfg.stokes.eps_abs;
  m.stokes_eps_rel = cfg.stokes.eps_rel;
  m.stokes_symbols = cfg.stokes.symbol_mode;
  m.stokes_iterations.clear();
  for (const auto& f : rep.unit_flows) m.stokes_iterations.push_back(f.result.report.iterations);
}

void solve_transports(const IndicatorField& h, const RunConfig& cfg, RunReport& rep) {
  rep.transports.clear();
  rep.tensors.D.reset();
  rep.transport_skipped.clear();
  auto& m = rep.tensors.meta;
  m.transport_eps = cfg.transport.eps;
  m.transport_symbols = cfg.transport.symbol_mode;
  m.transport_iterations.clear();
  m.transport_g_p = rep.transport_flow().g_p;

  if (!cfg.run_transport) {
    rep.transport_skipped = "transport disabled";
    return;
  }
  if (h.pore_count() == 0) {
    rep.transport_skipped = "no pore space: transport and D are undefined";
    return;
  }
  const VectorField& u = rep.transport_flow().result.state.u;
  if (!u.all_finite()) {
    rep.transport_skipped = "driving flow field is not finite";
    return;
  }
  const int d = h.grid().dim();
  std::vector<TransportState> chis;
  for (int j = 0; j < d; ++j) {
    TransportConfig tc = cfg.transport;
    tc.g_chi = unit_vector(d, j);
    const auto t0 = Clock::now();
    TransportSolver solver(h, u, tc);
    TransportRun tr{tc.g_chi, solver.solve(), 0.0};
    tr.seconds = seconds_since(t0);
    m.transport_iterations.push_back(tr.result.report.iterations);
    chis.push_back(tr.result.state);
    rep.transports.push_back(std::move(tr));
  }
  const bool finite = std::all_of(chis.begin(), chis.end(), [](const TransportState& s) {
    return s.chi.all_finite() && s.grad_chi.all_finite();
  });
  if (!finite) return;
  std::vector<VectorField> us;
  for (const auto& f : rep.unit_flows) us.push_back(f.result.state.u);
  rep.tensors.D = diffusivity(us, chis, h, cfg.transport.pe);
}

// Shortest decimal that reads back as the same double.
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json tensor_json(const Tensor& t) {
  json rows = json::array();
  for (int i = 0; i < t.dim; ++i) {
    json row = json::array();
    for (int j = 0; j < t.dim; ++j) row.push_back(t(i, j));
    rows.push_back(row);
  }
  return rows;
}

json penalties_json(const PenaltyParams& p) {
  return json{{"adaptive", p.adaptive}, {"alpha", p.alpha}, {"beta", p.beta}, {"b", p.b},
              {"phi", p.phi}, {"tau", p.tau}, {"psi_min", p.psi_min}};
}

json flow_json(const FlowRun& f, const IndicatorField* h) {
  static constexpr const char* names[] = {"solid", "incompressibility", "coupling"};
  const auto& rep = f.result.report;
  json res = json::array();
  if (!rep.history.empty()) {
    const auto& r = rep.history.back().residuals;
    for (std::size_t k = 0; k < 3; ++k) {
      res.push_back({{"constraint", names[k]}, {"primal", r[k].primal}, {"dual", r[k].dual},
                     {"primal_tol", r[k].primal_tol}, {"dual_tol", r[k].dual_tol}});
    }
  }
  json j{{"g_p", f.g_p},
         {"converged", rep.converged},
         {"iterations", rep.iterations},
         {"message", rep.message},
         {"final_residuals", res},
         {"final_penalties", penalties_json(f.result.final_penalties)}};
  if (h && h->pore_count() > 0) j["u_bar"] = pore_average(f.result.state.u, *h);
  return j;
}

}  // namespace

GeometrySpec parse_geometry_spec(const std::string& s) {
  GeometrySpec g;
  g.source = s;
  g.obstacles.clear();
  const auto colon = s.find(':');
  const std::string kind = colon == std::string::npos ? "" : s.substr(0, colon);
  if (kind == "disk" || kind == "ellipse") {
    std::string body = s.substr(colon + 1);
    std::array<double, 2> center{0.5, 0.5};
    if (const auto at = body.find('@'); at != std::string::npos) {
      const auto c = parse_numbers(body.substr(at + 1), "geometry centre");
      if (c.size() != 2) throw ConfigError("geometry centre needs two coordinates: " + s);
      center = {c[0], c[1]};
      body = body.substr(0, at);
    }
    const auto v = parse_numbers(body, "geometry " + kind);
    if (kind == "disk") {
      if (v.size() != 1) throw ConfigError("disk geometry takes one radius: " + s);
      g.obstacles.emplace_back(Disk{center, v[0]});
    } else {
      if (v.size() != 3) throw ConfigError("ellipse geometry takes A,B,ANGLE: " + s);
      g.obstacles.emplace_back(Ellipse{center, {v[0], v[1]}, v[2] * std::numbers::pi / 180.0});
    }
  } else if (kind == "random") {
    const auto v = parse_numbers(s.substr(colon + 1), "random geometry");
    if (v.size() != 4) throw ConfigError("random geometry takes SEED,COUNT,RMIN,RMAX: " + s);
    g.random = true;
    g.seed = static_cast<std::uint64_t>(v[0]);
    g.count = static_cast<int>(v[1]);
    g.r_min = v[2];
    g.r_max = v[3];
  } else {
    g.raster = s;
  }
  return g;
}

IndicatorField build_geometry(const GeometrySpec& g) {
  if (g.raster) {
    IndicatorField h = load_indicator_raster(*g.raster, g.threshold);
    if (g.resolution) return resample_nearest(h, UnitCellGrid::uniform(*g.resolution, h.grid().dim()));
    return h;
  }
  const UnitCellGrid grid = UnitCellGrid::uniform(g.resolution.value_or(128));
  if (g.random) return make_random_inclusions(grid, g.seed, g.count, g.r_min, g.r_max);
  return make_model_geometry(grid, g.obstacles);
}

SweepSpec parse_sweep_spec(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep must look like PARAM=v1,v2,...: " + s);
  SweepSpec sw{s.substr(0, eq), parse_numbers(s.substr(eq + 1), "sweep values")};
  static const std::vector<std::string> known{"alpha", "beta", "b", "a0", "b0", "eta", "pe", "tol", "resolution"};
  if (std::find(known.begin(), known.end(), sw.param) == known.end())
    throw ConfigError("unknown sweep parameter '" + sw.param + "'");
  if (sw.values.empty()) throw ConfigError("sweep list is empty");
  return sw;
}

void RunConfig::validate() const {
  if (geometry.raster && !geometry.obstacles.empty()) throw ConfigError("exactly one geometry source is allowed");
  if (!geometry.raster && !geometry.random && geometry.obstacles.empty())
    throw ConfigError("no geometry source given");
  if (sweep && sweep->values.empty()) throw ConfigError("sweep list is empty");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  for (auto v : {alpha, beta, b}) {
    if (v && !(*v > 0.0)) throw ConfigError("penalties must be positive");
  }
}

PenaltyParams RunConfig::penalties_for(const UnitCellGrid& grid) const {
  PenaltyParams p = adaptive ? PenaltyParams::adaptive_schedule() : PenaltyParams::scaled_to_grid(grid, stokes.nu);
  if (alpha) p.alpha = *alpha;
  if (beta) p.beta = *beta;
  if (b) p.b = *b;
  return p;
}

bool RunReport::stokes_converged() const {
  const bool units = std::all_of(unit_flows.begin(), unit_flows.end(),
                                 [](const FlowRun& f) { return f.result.report.converged; });
  return units && (!driven_flow || driven_flow->result.report.converged);
}

bool RunReport::transport_converged() const {
  return std::all_of(transports.begin(), transports.end(),
                     [](const TransportRun& t) { return t.result.report.converged(); });
}

const FlowRun& RunReport::transport_flow() const {
  if (driven_flow) return *driven_flow;
  const int i = unit_index(config.stokes.g_p);
  return unit_flows.at(static_cast<std::size_t>(i < 0 ? 0 : i));
}

int exit_code(const RunReport& r) { return r.converged() ? 0 : 2; }

void write_stokes_history(const StokesReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iter,r_p1,r_d1,r_p1_tol,r_d1_tol,r_p2,r_d2,r_p2_tol,r_d2_tol,r_p3,r_d3,r_p3_tol,r_d3_tol,alpha,beta,b\n";
  for (std::size_t it = 0; it < r.history.size(); ++it) {
    const auto& rec = r.history[it];
    out << it + 1;
    for (const auto& p : rec.residuals) {
      out << ',' << format_double(p.primal) << ',' << format_double(p.dual) << ',' << format_double(p.primal_tol)
          << ',' << format_double(p.dual_tol);
    }
    out << ',' << format_double(rec.alpha) << ',' << format_double(rec.beta) << ',' << format_double(rec.b) << '\n';
  }
}

void write_transport_history(const TransportReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iter,r1,r2,r1_tol,r2_tol\n";
  for (std::size_t it = 0; it < r.history.size(); ++it) {
    const auto& rec = r.history[it];
    out << it + 1 << ',' << format_double(rec.r1) << ',' << format_double(rec.r2) << ',' << format_double(rec.tol1)
        << ',' << format_double(rec.tol2) << '\n';
  }
}

std::string report_json(const RunReport& r, bool include_timing) {
  const auto& c = r.config;
  const auto& t = c.transport;
  json cfg{{"geometry", {{"source", c.geometry.source}, {"threshold", c.geometry.threshold}}},
           {"stokes",
            {{"nu", c.stokes.nu},
             {"g_p", c.stokes.g_p},
             {"eps_abs", c.stokes.eps_abs},
             {"eps_rel", c.stokes.eps_rel},
             {"max_iter", c.stokes.max_iter},
             {"symbol_mode", to_string(c.stokes.symbol_mode)}}},
           {"transport",
            {{"enabled", c.run_transport},
             {"pe", t.pe},
             {"eta", t.eta},
             {"a0", t.a0},
             {"b0", t.b0},
             {"eps", t.eps},
             {"max_iter", t.max_iter},
             {"symbol_mode", to_string(t.symbol_mode)}}}};
  if (c.geometry.resolution) cfg["geometry"]["resolution"] = *c.geometry.resolution;
  if (t.b0_vector) cfg["transport"]["b0_vector"] = *t.b0_vector;
  if (!r.unit_flows.empty()) cfg["penalties"] = penalties_json(r.config.penalties_for(r.unit_flows[0].result.state.u.grid()));

  json j{{"schema", "porofft.run_report"}, {"version", kReportSchemaVersion}, {"config", cfg}};
  if (!r.unit_flows.empty()) {
    const auto dims = r.unit_flows[0].result.state.u.grid().dims();
    j["grid"] = {{"dims", std::vector<int>(dims.begin(), dims.end())}};
  }
  j["porosity"] = r.porosity;
  j["converged"] = r.converged();

  json flows = json::array();
  for (const auto& f : r.unit_flows) flows.push_back(flow_json(f, nullptr));
  for (std::size_t i = 0; i < r.unit_flows.size() && i < r.tensors.u_bar.size(); ++i) {
    flows[i]["u_bar"] = r.tensors.u_bar[i];
  }
  j["stokes"] = flows;
  j["driven_flow"] = r.driven_flow ? flow_json(*r.driven_flow, nullptr) : json(nullptr);

  json tr;
  if (!r.transport_skipped.empty()) {
    tr["skipped"] = r.transport_skipped;
  } else {
    json runs = json::array();
    for (const auto& x : r.transports) {
      const auto& rep = x.result.report;
      json run{{"g_chi", x.g_chi},
               {"status", to_string(rep.status)},
               {"converged", rep.converged()},
               {"iterations", rep.iterations},
               {"message", rep.message}};
      if (!rep.history.empty()) {
        const auto& last = rep.history.back();
        run["final_residuals"] = {{"r1", last.r1}, {"r2", last.r2}, {"r1_tol", last.tol1}, {"r2_tol", last.tol2}};
      }
      runs.push_back(run);
    }
    tr["runs"] = runs;
  }
  j["transport"] = tr;

  const auto& m = r.tensors.meta;
  j["tensors"] = {{"K", tensor_json(r.tensors.K)},
                  {"D", r.tensors.D ? tensor_json(*r.tensors.D) : json(nullptr)},
                  {"porosity", r.tensors.porosity},
                  {"u_bar", r.tensors.u_bar},
                  {"meta",
                   {{"nu", m.nu},
                    {"stokes_eps_abs", m.stokes_eps_abs},
                    {"stokes_eps_rel", m.stokes_eps_rel},
                    {"stokes_symbol_mode", to_string(m.stokes_symbols)},
                    {"stokes_iterations", m.stokes_iterations},
                    {"transport_eps", m.transport_eps},
                    {"transport_symbol_mode", to_string(m.transport_symbols)},
                    {"transport_iterations", m.transport_iterations},
                    {"transport_g_p", m.transport_g_p}}}};
  if (include_timing) j["timing"] = r.timing;
  return j.dump(2) + "\n";
}

namespace {

void write_artifacts(const RunReport& rep, const IndicatorField& h) {
  const auto& cfg = rep.config;
  const auto& dir = cfg.out_dir;
  std::filesystem::create_directories(dir);
  if (h.grid().dim() == 2) write_indicator(h, dir / "indicator.pgm");
  if (cfg.write_histories) {
    for (std::size_t i = 0; i < rep.unit_flows.size(); ++i) {
      write_stokes_history(rep.unit_flows[i].result.report, dir / ("stokes_history_e" + std::to_string(i + 1) + ".csv"));
    }
    if (rep.driven_flow) write_stokes_history(rep.driven_flow->result.report, dir / "stokes_history_gp.csv");
    for (std::size_t j = 0; j < rep.transports.size(); ++j) {
      write_transport_history(rep.transports[j].result.report,
                              dir / ("transport_history_e" + std::to_string(j + 1) + ".csv"));
    }
  }
  if (cfg.write_fields) {
    for (FieldFormat fmt : cfg.field_formats) {
      const std::string ext = fmt == FieldFormat::Csv ? ".csv" : ".vtk";
      for (std::size_t i = 0; i < rep.unit_flows.size(); ++i) {
        export_field(rep.unit_flows[i].result.state.u, fmt, dir / ("u_e" + std::to_string(i + 1) + ext), "u");
      }
      if (rep.driven_flow) export_field(rep.driven_flow->result.state.u, fmt, dir / ("u_gp" + ext), "u");
      for (std::size_t j = 0; j < rep.transports.size(); ++j) {
        const auto& s = rep.transports[j].result.state;
        export_field(s.chi, fmt, dir / ("chi_e" + std::to_string(j + 1) + ext), "chi");
        export_field(s.grad_chi, fmt, dir / ("grad_chi_e" + std::to_string(j + 1) + ext), "grad_chi");
      }
    }
  }
  std::ofstream out(dir / "report.json");
  if (!out) throw IoError("cannot write " + (dir / "report.json").string());
  out << report_json(rep);
}

}  // namespace

RunReport run(const RunConfig& cfg) {
  cfg.validate();
  RunReport rep;
  rep.config = cfg;
  const auto t0 = Clock::now();
  const IndicatorField h = build_geometry(cfg.geometry);
  rep.porosity = porosity(h);
  rep.timing["geometry"] = seconds_since(t0);

  const auto t1 = Clock::now();
  solve_flows(h, cfg, rep);
  rep.timing["stokes"] = seconds_since(t1);

  const auto t2 = Clock::now();
  solve_transports(h, cfg, rep);
  rep.timing["transport"] = seconds_since(t2);

  if (!cfg.out_dir.empty()) {
    const auto t3 = Clock::now();
    write_artifacts(rep, h);
    rep.timing["output"] = seconds_since(t3);
  }
  rep.timing["total"] = seconds_since(t0);
  return rep;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  if (!cfg.sweep) throw ConfigError("run_sweep needs a sweep specification");
  cfg.validate();
  const SweepSpec& sw = *cfg.sweep;
  const bool transport_only = sw.param == "a0" || sw.param == "b0" || sw.param == "eta" || sw.param == "pe";
  const bool flow_only = sw.param == "alpha" || sw.param == "beta" || sw.param == "b";

  RunConfig base = cfg;
  base.sweep.reset();
  base.out_dir.clear();
  if (flow_only) base.run_transport = false;

  // Transport-only sweeps share one set of flows.
  std::optional<IndicatorField> h;
  RunReport flows;
  if (transport_only) {
    h = build_geometry(base.geometry);
    flows.config = base;
    flows.porosity = porosity(*h);
    solve_flows(*h, base, flows);
  }

  auto one = [&](double v) {
    RunConfig c = base;
    RunReport rep;
    if (sw.param == "alpha") c.alpha = v;
    if (sw.param == "beta") c.beta = v;
    if (sw.param == "b") c.b = v;
    if (sw.param == "a0") c.transport.a0 = v;
    if (sw.param == "b0") c.transport.b0 = v;
    if (sw.param == "eta") c.transport.eta = v;
    if (sw.param == "pe") c.transport.pe = v;
    if (sw.param == "tol") c.stokes.eps_abs = c.stokes.eps_rel = c.transport.eps = v;
    if (sw.param == "resolution") c.geometry.resolution = static_cast<int>(v);
    if (transport_only) {
      rep = flows;
      rep.config = c;
      solve_transports(*h, c, rep);
    } else {
      rep = run(c);
    }
    SweepRow row;
    row.value = v;
    const auto& f = rep.unit_flows.front().result.report;
    row.stokes_iterations = f.iterations;
    row.stokes_converged = f.converged;
    if (!rep.transports.empty()) {
      const auto& t = rep.transports.front().result.report;
      row.transport_iterations = t.iterations;
      row.transport_status = std::string(to_string(t.status));
    } else {
      row.transport_status = "skipped";
    }
    row.k11 = rep.tensors.K(0, 0);
    row.k22 = rep.tensors.K.dim > 1 ? rep.tensors.K(1, 1) : 0.0;
    if (rep.tensors.D) {
      row.d11 = (*rep.tensors.D)(0, 0);
      row.d22 = rep.tensors.D->dim > 1 ? (*rep.tensors.D)(1, 1) : 0.0;
    }
    return row;
  };

  std::vector<SweepRow> rows(sw.values.size());
  const auto jobs = static_cast<std::size_t>(cfg.jobs);
  for (std::size_t start = 0; start < sw.values.size(); start += jobs) {
    std::vector<std::future<SweepRow>> batch;
    const std::size_t stop = std::min(sw.values.size(), start + jobs);
    for (std::size_t k = start; k < stop; ++k) batch.push_back(std::async(std::launch::async, one, sw.values[k]));
    for (std::size_t k = start; k < stop; ++k) rows[k] = batch[k - start].get();
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir / "sweep.csv");
    if (!out) throw IoError("cannot write sweep.csv");
    out << sw.param << ",stokes_iterations,stokes_converged,transport_iterations,transport_status,K11,K22,D11,D22\n";
    for (const auto& r : rows) {
      out << shortest(r.value) << ',' << r.stokes_iterations << ',' << (r.stokes_converged ? 1 : 0) << ','
          << r.transport_iterations << ',' << r.transport_status << ',' << format_double(r.k11) << ','
          << format_double(r.k22) << ',' << format_double(r.d11) << ',' << format_double(r.d22) << '\n';
    }
  }
  return rows;
}

}  // namespace porofft
