#include "koksma/point_set.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

namespace koksma {

PointSet validate(const std::vector<std::vector<double>>& raw, int d) {
  if (raw.empty()) throw ValidationError("point list is empty");
  if (d <= 0) throw DimensionMismatch("dimension must be positive");
  std::vector<double> flat;
  flat.reserve(raw.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (static_cast<int>(raw[i].size()) != d)
      throw DimensionMismatch("point " + std::to_string(i) + " has " +
                              std::to_string(raw[i].size()) + " coordinates, expected " +
                              std::to_string(d));
    for (double c : raw[i]) flat.push_back(c);
  }
  return validate_flat(std::move(flat), d);
}

PointSet validate_flat(std::vector<double> coords, int d) {
  if (d <= 0) throw DimensionMismatch("dimension must be positive");
  if (coords.empty() || coords.size() % static_cast<std::size_t>(d) != 0)
    throw DimensionMismatch("coordinate buffer is not a multiple of d");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double c = coords[i];
    if (!(c >= 0.0 && c <= 1.0))  // also rejects NaN
      throw OutOfUnitCube(i / static_cast<std::size_t>(d), c);
  }
  PointSet ps;
  ps.d = d;
  ps.coords = std::move(coords);
  return ps;
}

MapSpec MapSpec::identity(int d) {
  if (d <= 0) throw DimensionMismatch("identity map needs positive dimension");
  MapSpec m;
  m.kind = Kind::identity;
  m.d_in = d;
  m.d_out = d;
  return m;
}

MapSpec MapSpec::select(int d_in, std::vector<int> idx_zero_based) {
  if (d_in <= 0) throw DimensionMismatch("selection map needs positive input dimension");
  if (idx_zero_based.empty()) throw ValidationError("selection map needs at least one index");
  for (int j : idx_zero_based)
    if (j < 0 || j >= d_in)
      throw ValidationError("selection index " + std::to_string(j + 1) + " out of range 1.." +
                            std::to_string(d_in));
  MapSpec m;
  m.kind = Kind::select;
  m.d_in = d_in;
  m.d_out = static_cast<int>(idx_zero_based.size());
  m.select_idx = std::move(idx_zero_based);
  return m;
}

MapSpec MapSpec::affine_clamp(int d_in, int d_out, std::vector<double> matrix,
                              std::vector<double> offset) {
  if (d_in <= 0 || d_out <= 0) throw DimensionMismatch("affine map needs positive dimensions");
  if (matrix.size() != static_cast<std::size_t>(d_in) * static_cast<std::size_t>(d_out))
    throw ShapeMismatch("affine matrix must be d_out x d_in");
  if (offset.size() != static_cast<std::size_t>(d_out))
    throw ShapeMismatch("affine offset must have d_out entries");
  MapSpec m;
  m.kind = Kind::affine_clamp;
  m.d_in = d_in;
  m.d_out = d_out;
  m.matrix = std::move(matrix);
  m.offset = std::move(offset);
  return m;
}

MapSpec MapSpec::tabulated(
    int d_in, int d_out,
    std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs) {
  if (d_in <= 0 || d_out <= 0) throw DimensionMismatch("tabulated map needs positive dimensions");
  if (pairs.empty()) throw ValidationError("tabulated map needs at least one pair");
  for (const auto& [in, out] : pairs) {
    if (static_cast<int>(in.size()) != d_in || static_cast<int>(out.size()) != d_out)
      throw ShapeMismatch("tabulated pair dimensions disagree with the declared map");
    for (double c : out)
      if (!(c >= 0.0 && c <= 1.0))
        throw MapRangeViolation("tabulated image coordinate " + std::to_string(c) +
                                " lies outside [0,1]");
  }
  MapSpec m;
  m.kind = Kind::tabulated;
  m.d_in = d_in;
  m.d_out = d_out;
  m.table = std::move(pairs);
  return m;
}

std::vector<double> apply_map_point(const MapSpec& map, std::span<const double> in) {
  if (static_cast<int>(in.size()) != map.d_in)
    throw DimensionMismatch("point dimension disagrees with map input dimension");
  switch (map.kind) {
    case MapSpec::Kind::identity:
      return {in.begin(), in.end()};
    case MapSpec::Kind::select: {
      std::vector<double> out(static_cast<std::size_t>(map.d_out));
      for (int j = 0; j < map.d_out; ++j)
        out[static_cast<std::size_t>(j)] = in[static_cast<std::size_t>(map.select_idx[static_cast<std::size_t>(j)])];
      return out;
    }
    case MapSpec::Kind::affine_clamp: {
      std::vector<double> out(static_cast<std::size_t>(map.d_out));
      for (int j = 0; j < map.d_out; ++j) {
        double acc = map.offset[static_cast<std::size_t>(j)];
        const double* row = map.matrix.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(map.d_in);
        for (int k = 0; k < map.d_in; ++k) acc += row[k] * in[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(j)] = std::min(1.0, std::max(0.0, acc));
      }
      return out;
    }
    case MapSpec::Kind::tabulated: {
      for (const auto& [key, val] : map.table) {
        bool hit = true;
        for (int k = 0; k < map.d_in; ++k)
          if (key[static_cast<std::size_t>(k)] != in[static_cast<std::size_t>(k)]) {
            hit = false;
            break;
          }
        if (hit) return val;
      }
      throw MapRangeViolation("input point is not in the tabulated support");
    }
  }
  throw ValidationError("unknown map kind");
}

PointSet apply_map(const PointSet& ps, const MapSpec& map) {
  if (map.d_in != ps.d)
    throw DimensionMismatch("map input dimension " + std::to_string(map.d_in) +
                            " disagrees with point set dimension " + std::to_string(ps.d));
  PointSet out;
  out.d = map.d_out;
  out.coords.reserve(ps.size() * static_cast<std::size_t>(map.d_out));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    std::vector<double> img = apply_map_point(map, ps.point(i));
    for (double c : img) {
      if (!(c >= 0.0 && c <= 1.0))
        throw MapRangeViolation("image coordinate " + std::to_string(c) + " of point " +
                                std::to_string(i) + " lies outside [0,1]");
      out.coords.push_back(c);
    }
  }
  return out;
}

namespace {

double radical_inverse(std::size_t n, int base) {
  const double inv = 1.0 / base;
  double f = inv;
  double x = 0.0;
  while (n) {
    x += static_cast<double>(n % static_cast<std::size_t>(base)) * f;
    n /= static_cast<std::size_t>(base);
    f *= inv;
  }
  return x;
}

}  // namespace

PointSet van_der_corput(std::size_t m, int base) {
  if (m < 1) throw ValidationError("need at least one point");
  if (base < 2) throw InvalidBase("radical-inverse base must be at least 2");
  PointSet ps;
  ps.d = 1;
  ps.coords.resize(m);
  for (std::size_t i = 0; i < m; ++i) ps.coords[i] = radical_inverse(i + 1, base);
  return ps;
}

PointSet halton(std::size_t m, int d) {
  static constexpr std::array<int, 8> primes = {2, 3, 5, 7, 11, 13, 17, 19};
  if (m < 1) throw ValidationError("need at least one point");
  if (d < 1 || d > 8)
    throw DimensionTooLarge("halton generation supports dimensions 1..8, got " + std::to_string(d));
  PointSet ps;
  ps.d = d;
  ps.coords.resize(m * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j)
      ps.coords[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
          radical_inverse(i + 1, primes[static_cast<std::size_t>(j)]);
  return ps;
}

PointSet equispaced_centers(std::size_t m) {
  if (m < 1) throw ValidationError("need at least one point");
  PointSet ps;
  ps.d = 1;
  ps.coords.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    ps.coords[i] = (2.0 * static_cast<double>(i + 1) - 1.0) / (2.0 * static_cast<double>(m));
  return ps;
}

void write_points_csv(std::ostream& os, const PointSet& ps) {
  os << "# d=" << ps.d << "\n";
  char buf[40];
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (int j = 0; j < ps.d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ps.at(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << "\n";
  }
}

PointSet read_points_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(is, line)) throw ParseError("empty file", 1);
  ++line_no;
  int d = 0;
  {
    const char* p = line.c_str();
    if (std::sscanf(p, "# d=%d", &d) != 1 || d <= 0)
      throw ParseError("expected header of the form '# d=<dimension>'", line_no);
  }

  std::vector<double> flat;
  std::size_t points = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) {
      // Allow a single trailing newline, nothing else.
      if (is.peek() == std::char_traits<char>::eof()) break;
      throw ParseError("blank line", line_no);
    }
    const char* p = line.c_str();
    int fields = 0;
    while (true) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw ParseError("expected a decimal coordinate", line_no);
      flat.push_back(v);
      ++fields;
      p = end;
      if (*p == ',') {
        ++p;
        continue;
      }
      if (*p == '\0' || *p == '\r') break;
      throw ParseError(std::string("unexpected character '") + *p + "'", line_no);
    }
    if (fields != d)
      throw ParseError("expected " + std::to_string(d) + " coordinates, found " +
                       std::to_string(fields), line_no);
    ++points;
  }
  if (points == 0) throw ParseError("no points after the header", line_no);
  try {
    return validate_flat(std::move(flat), d);
  } catch (const OutOfUnitCube& e) {
    throw ParseError("coordinate " + std::to_string(e.coordinate) + " of point " +
                     std::to_string(e.index + 1) + " lies outside [0,1]", e.index + 2);
  }
}

}  // namespace koksma
