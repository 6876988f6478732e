#pragma once

// Design JSON schema, fixed-precision number formatting and CSV emitters.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccchart/chart_geometry.hpp"
#include "ccchart/converter_model.hpp"
#include "ccchart/error.hpp"
#include "ccchart/slice.hpp"

namespace ccchart::io {

using nlohmann::json;

/// Nine significant digits, as used in every result file.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x == 0.0 ? 0.0 : x);
  return buf;
}

/// x rounded to nine significant digits, for storing in JSON results.
inline double round9(double x) { return std::isfinite(x) ? std::stod(fmt(x)) : x; }

// ---------------------------------------------------------------------------
// Design schema

inline json design_to_json(const ConverterDesign& d) {
  json j;
  j["name"] = d.name();
  j["legs"] = d.legs();
  j["reconfigurable"] = d.is_reconfigurable();
  if (d.wiring()) {
    std::vector<int> wiring;
    for (int w : d.wiring()->wires()) wiring.push_back(w + 1);
    j["wiring"] = wiring;
  }
  j["base_current"] = d.base_current();
  if (d.is_idealised()) j["idealised"] = true;
  return j;
}

inline ConverterDesign design_from_json(const json& j) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::schema, msg); };
  if (!j.is_object()) fail("design must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "name" && key != "legs" && key != "reconfigurable" && key != "wiring" &&
        key != "base_current" && key != "idealised" && key != "config")
      fail("unknown design field '" + key + "'");
  if (!j.contains("name") || !j["name"].is_string()) fail("'name' must be a string");
  if (!j.contains("reconfigurable") || !j["reconfigurable"].is_boolean())
    fail("'reconfigurable' must be a boolean");
  const std::string name = j["name"];
  const bool reconfigurable = j["reconfigurable"];
  double base = 1.0;
  if (j.contains("base_current")) {
    if (!j["base_current"].is_number()) fail("'base_current' must be a number");
    base = j["base_current"];
  }
  const bool idealised = j.value("idealised", false);
  if (j.contains("idealised") && !j["idealised"].is_boolean()) fail("'idealised' must be a boolean");

  try {
    if (idealised) {
      if (!reconfigurable) fail("an idealised design is reconfigurable");
      if (j.contains("legs") && !(j["legs"].is_array() && j["legs"].empty()))
        fail("an idealised design has no legs");
      return ConverterDesign::idealised(name, base);
    }
    if (!j.contains("legs") || !j["legs"].is_array()) fail("'legs' must be an array");
    std::vector<double> legs;
    for (const auto& v : j["legs"]) {
      if (!v.is_number()) fail("'legs' entries must be numbers");
      legs.push_back(v.get<double>());
    }
    if (reconfigurable) {
      if (j.contains("wiring")) fail("'wiring' is only allowed for fixed designs");
      return ConverterDesign::reconfigurable(name, legs, base);
    }
    if (!j.contains("wiring") || !j["wiring"].is_array()) fail("fixed designs need 'wiring'");
    std::vector<int> wiring;
    for (const auto& v : j["wiring"]) {
      if (!v.is_number_integer()) fail("'wiring' entries must be integers");
      const int w = v.get<int>();
      if (w < 1 || w > 4) fail("'wiring' entries must be wire indices 1..4");
      wiring.push_back(w - 1);
    }
    return ConverterDesign::fixed(name, legs, wiring, base);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::schema) throw;
    throw Error(ErrorKind::schema, e.what());
  }
}

inline json read_json_file(const std::filesystem::path& path, ErrorKind parse_error) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::not_found, "no such file: " + path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::not_found, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(parse_error, path.string() + ": " + e.what());
  }
}

inline ConverterDesign load_design(const std::filesystem::path& path) {
  return design_from_json(read_json_file(path, ErrorKind::schema));
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::invalid_input, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::invalid_input, "failed writing " + path.string());
}

inline void save_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// CSV

inline std::string boundary_csv(const BoundaryTrace& t) {
  std::ostringstream os;
  if (t.mode == DirectionMode::spherical) {
    os << "theta_rad,psi_rad,r_pu\n";
    for (const auto& s : t.samples) os << fmt(s.theta) << ',' << fmt(s.psi) << ',' << fmt(s.r) << '\n';
  } else {
    os << "theta_rad,r_pu\n";
    for (const auto& s : t.samples) os << fmt(s.theta) << ',' << fmt(s.r) << '\n';
  }
  return os.str();
}

/// Parses a boundary CSV back into samples; throws malformed_result.
inline BoundaryTrace parse_boundary_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  BoundaryTrace t;
  if (!std::getline(is, line)) throw Error(ErrorKind::malformed_result, "empty boundary CSV");
  int cols;
  if (line == "theta_rad,r_pu") {
    cols = 2;
    t.mode = DirectionMode::planar;
  } else if (line == "theta_rad,psi_rad,r_pu") {
    cols = 3;
    t.mode = DirectionMode::spherical;
  } else {
    throw Error(ErrorKind::malformed_result, "unexpected boundary CSV header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::malformed_result, "bad number in boundary CSV: " + cell);
      }
    }
    if (static_cast<int>(v.size()) != cols)
      throw Error(ErrorKind::malformed_result, "wrong column count in boundary CSV");
    t.samples.push_back(cols == 2 ? BoundarySample{v[0], 0.0, v[1]} : BoundarySample{v[0], v[1], v[2]});
  }
  return t;
}

inline std::string slice_csv(const SliceMask& s) {
  std::ostringstream os;
  os << "phat1,phat2,feasible\n";
  const int n = s.n();
  for (int iy = 0; iy < n; ++iy) {
    const std::string y = fmt(s.grid.coord(iy));
    for (int ix = 0; ix < n; ++ix)
      os << fmt(s.grid.coord(ix)) << ',' << y << ',' << (s.at(ix, iy) ? 1 : 0) << '\n';
  }
  return os.str();
}

inline json features_to_json(const std::vector<IsolatedFeature>& features) {
  json out = json::array();
  for (const auto& f : features)
    out.push_back({{"kind", to_string(f.kind)},
                   {"wire", f.wire},
                   {"start", {round9(f.start[0]), round9(f.start[1])}},
                   {"end", {round9(f.end[0]), round9(f.end[1])}}});
  return out;
}

/// Rebuilds a slice mask from its CSV; the grid must be square, odd and
/// centred on the origin.
inline SliceMask parse_slice_csv(const std::string& text, double total_power) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "phat1,phat2,feasible")
    throw Error(ErrorKind::malformed_result, "unexpected slice CSV header");
  std::vector<std::uint8_t> cells;
  double first = NAN;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double x, y;
    int f;
    char c1, c2;
    std::istringstream ls(line);
    if (!(ls >> x >> c1 >> y >> c2 >> f) || c1 != ',' || c2 != ',' || (f != 0 && f != 1))
      throw Error(ErrorKind::malformed_result, "bad slice CSV row: " + line);
    if (std::isnan(first)) first = x;
    cells.push_back(static_cast<std::uint8_t>(f));
  }
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cells.size()))));
  if (n < 21 || static_cast<std::size_t>(n) * n != cells.size() || n % 2 == 0)
    throw Error(ErrorKind::malformed_result, "slice CSV is not a square odd grid");
  SliceMask s;
  s.total_power = total_power;
  s.grid = GridSpec{n, -first};
  s.mask = std::move(cells);
  return s;
}

}  // namespace ccchart::io
