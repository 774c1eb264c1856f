#include "porofft/raster_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "porofft/error.hpp"

namespace porofft {
namespace {

struct Raster {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, row 0 first
};

std::string lowercase_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Skips whitespace and '#' comments between PGM header tokens.
int read_pgm_header_int(std::istream& in, const std::string& path) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v = 0;
  if (!(in >> v)) throw IoError("malformed PGM header in " + path);
  return v;
}

Raster read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open raster " + path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5") throw IoError("not a binary PGM (P5) file: " + path.string());
  Raster r;
  r.width = read_pgm_header_int(in, path.string());
  r.height = read_pgm_header_int(in, path.string());
  const int maxval = read_pgm_header_int(in, path.string());
  if (r.width <= 0 || r.height <= 0) throw IoError("empty raster " + path.string());
  if (maxval <= 0 || maxval > 65535) throw IoError("bad PGM maxval in " + path.string());
  in.get();  // single whitespace byte before the pixel block
  const std::size_t count = static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height);
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf(count * bytes_per);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    throw IoError("truncated PGM pixel data in " + path.string());
  r.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const unsigned v = bytes_per == 1 ? buf[k] : (unsigned{buf[2 * k]} << 8) | buf[2 * k + 1];
    r.values[k] = static_cast<double>(v) / maxval;
  }
  return r;
}

Raster read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open raster " + path.string());
  Raster r;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      if (first == std::string::npos) throw IoError("empty CSV cell in " + path.string());
      const char* b = cell.data() + first;
      const char* e = cell.data() + last + 1;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || ptr != e) throw IoError("non-numeric CSV cell '" + cell + "' in " + path.string());
      row.push_back(v);
    }
    if (r.height == 0) {
      r.width = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != r.width) {
      throw IoError("non-rectangular CSV raster " + path.string());
    }
    r.values.insert(r.values.end(), row.begin(), row.end());
    ++r.height;
  }
  if (r.height == 0 || r.width == 0) throw IoError("empty raster " + path.string());
  return r;
}

}  // namespace

IndicatorField load_indicator_raster(const std::filesystem::path& path, double threshold) {
  const std::string ext = lowercase_extension(path);
  Raster r;
  if (ext == ".pgm") {
    r = read_pgm(path);
  } else if (ext == ".csv") {
    r = read_csv(path);
  } else {
    throw IoError("unsupported raster format '" + ext + "' (expected .pgm or .csv)");
  }
  if (r.width < 4 || r.height < 4)
    throw IoError("raster " + path.string() + " is smaller than the 4x4 minimum grid");
  UnitCellGrid grid({r.width, r.height});
  std::vector<double> h(r.values.size());
  std::transform(r.values.begin(), r.values.end(), h.begin(),
                 [threshold](double v) { return v >= threshold ? 1.0 : 0.0; });
  return IndicatorField(grid, std::move(h));
}

void write_indicator(const IndicatorField& h, const std::filesystem::path& path) {
  const auto& g = h.grid();
  if (g.dim() != 2) throw IoError("indicator rasters are 2D");
  const std::string ext = lowercase_extension(path);
  const int w = g.extent(0), ht = g.extent(1);
  if (ext == ".pgm") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << w << ' ' << ht << "\n255\n";
    std::vector<unsigned char> px(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) px[k] = h.is_solid(k) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (!out) throw IoError("write failed for " + path.string());
  } else if (ext == ".csv") {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (int j = 0; j < ht; ++j) {
      for (int i = 0; i < w; ++i) {
        if (i) out << ',';
        out << (h.is_solid(g.index(i, j)) ? '1' : '0');
      }
      out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
  } else {
    throw IoError("unsupported raster format '" + ext + "' (expected .pgm or .csv)");
  }
}

IndicatorField resample_nearest(const IndicatorField& h, const UnitCellGrid& target) {
  const auto& src = h.grid();
  if (src.dim() != target.dim()) throw GridMismatch("resampling between grids of different dimension");
  if (src == target) return h;
  std::vector<double> out(target.num_points());
  std::vector<int> t(static_cast<std::size_t>(target.dim()));
  std::vector<int> s(t.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    target.unravel(k, t);
    for (int a = 0; a < target.dim(); ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double y = target.center(a, t[ua]);
      s[ua] = std::min(static_cast<int>(y * src.extent(a)), src.extent(a) - 1);
    }
    out[k] = h[src.index(s)];
  }
  return IndicatorField(target, std::move(out));
}

}  // namespace porofft
