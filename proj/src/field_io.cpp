#include "porofft/field_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "porofft/error.hpp"

namespace porofft {
namespace {

constexpr const char* kCsvMagic = "# porofft-field v1";

void write_csv(const UnitCellGrid& g, const std::vector<std::span<const double>>& comps,
               const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << kCsvMagic << '\n' << "# dims";
  for (int a = 0; a < g.dim(); ++a) out << ' ' << g.extent(a);
  out << "\n# spacing";
  for (int a = 0; a < g.dim(); ++a) out << ' ' << format_double(g.spacing(a));
  out << "\n# components " << comps.size() << '\n';
  static constexpr const char* axis_names[] = {"i", "j", "k"};
  for (int a = 0; a < g.dim(); ++a) out << (a ? "," : "") << (a < 3 ? axis_names[a] : "l");
  for (std::size_t c = 0; c < comps.size(); ++c) out << ",c" << c;
  out << '\n';
  std::vector<int> idx(static_cast<std::size_t>(g.dim()));
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    g.unravel(p, idx);
    for (std::size_t a = 0; a < idx.size(); ++a) out << (a ? "," : "") << idx[a];
    for (const auto& c : comps) out << ',' << format_double(c[p]);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_vtk(const UnitCellGrid& g, const std::vector<std::span<const double>>& comps,
               const std::filesystem::path& path, std::string_view name) {
  if (g.dim() > 3) throw IoError("VTK structured points support at most 3 axes");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# vtk DataFile Version 3.0\n" << "porofft field " << name << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS";
  for (int a = 0; a < 3; ++a) out << ' ' << (a < g.dim() ? g.extent(a) : 1);
  out << "\nORIGIN";
  for (int a = 0; a < 3; ++a) out << ' ' << format_double(a < g.dim() ? 0.5 * g.spacing(a) : 0.0);
  out << "\nSPACING";
  for (int a = 0; a < 3; ++a) out << ' ' << format_double(a < g.dim() ? g.spacing(a) : 1.0);
  out << "\nPOINT_DATA " << g.num_points() << '\n';
  for (std::size_t c = 0; c < comps.size(); ++c) {
    out << "SCALARS " << name;
    if (comps.size() > 1) out << '_' << c;
    out << " double 1\nLOOKUP_TABLE default\n";
    for (double v : comps[c]) out << format_double(v) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_any(const UnitCellGrid& g, const std::vector<std::span<const double>>& comps, FieldFormat format,
               const std::filesystem::path& path, std::string_view name) {
  if (format == FieldFormat::Csv) {
    write_csv(g, comps, path);
  } else {
    write_vtk(g, comps, path, name);
  }
}

double parse_double(std::string_view s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError("malformed number '" + std::string(s) + "' in " + path.string());
  return v;
}

}  // namespace

FieldFormat parse_field_format(std::string_view s) {
  if (s == "csv") return FieldFormat::Csv;
  if (s == "vtk") return FieldFormat::Vtk;
  throw ConfigError("unknown field format '" + std::string(s) + "' (expected csv|vtk)");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ScalarField FieldData::to_scalar() const {
  if (components.size() != 1) throw GridMismatch("field data is not scalar");
  return ScalarField(grid, components[0]);
}

VectorField FieldData::to_vector() const {
  if (static_cast<int>(components.size()) != grid.dim()) throw GridMismatch("field data is not a d-vector");
  VectorField f(grid);
  for (int c = 0; c < grid.dim(); ++c) {
    const auto& src = components[static_cast<std::size_t>(c)];
    std::copy(src.begin(), src.end(), f.component(c).begin());
  }
  return f;
}

void export_field(const ScalarField& f, FieldFormat format, const std::filesystem::path& path,
                  std::string_view name) {
  write_any(f.grid(), {f.values()}, format, path, name);
}

void export_field(const VectorField& f, FieldFormat format, const std::filesystem::path& path,
                  std::string_view name) {
  std::vector<std::span<const double>> comps;
  for (int c = 0; c < f.components(); ++c) comps.push_back(f.component(c));
  write_any(f.grid(), comps, format, path, name);
}

FieldData import_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvMagic) throw IoError("not a porofft field CSV: " + path.string());
  std::vector<int> dims;
  std::size_t ncomp = 0;
  while (in.peek() == '#' && std::getline(in, line)) {
    std::istringstream ss(line.substr(1));
    std::string key;
    ss >> key;
    if (key == "dims") {
      for (int v; ss >> v;) dims.push_back(v);
    } else if (key == "components") {
      ss >> ncomp;
    }
  }
  if (dims.empty() || ncomp == 0) throw IoError("field CSV header lacks dims/components: " + path.string());
  UnitCellGrid grid(dims);
  FieldData data{grid, std::vector<std::vector<double>>(ncomp, std::vector<double>(grid.num_points()))};
  std::getline(in, line);  // column names
  std::vector<int> idx(dims.size());
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto pos = rest.find(',');
      cells.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (cells.size() != dims.size() + ncomp) throw IoError("ragged row in " + path.string());
    for (std::size_t a = 0; a < dims.size(); ++a) {
      idx[a] = static_cast<int>(parse_double(cells[a], path));
      if (idx[a] < 0 || idx[a] >= dims[a]) throw IoError("grid index out of range in " + path.string());
    }
    const std::size_t p = grid.index(idx);
    for (std::size_t c = 0; c < ncomp; ++c) data.components[c][p] = parse_double(cells[dims.size() + c], path);
    ++rows;
  }
  if (rows != grid.num_points()) throw IoError("field CSV row count does not match dims: " + path.string());
  return data;
}

}  // namespace porofft
