#pragma once

// ccchart command-line front end. run() is kept separate from main() so the
// test suite can drive every subcommand in-process.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccchart/ccchart.hpp"
#include "ccchart/io.hpp"
#include "ccchart/svg.hpp"

namespace ccchart::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kMissingFile = 2,
  kBadSchema = 3,
  kConflictingFlags = 4,
  kMalformedResult = 5,
};

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> presets;
  std::vector<std::string> designs;
  std::optional<int> grid;
  std::optional<int> angles;
  std::optional<std::string> mode;
  std::optional<double> psi_deg;
  std::optional<double> ptotal;
  std::optional<double> step;
  std::string objective = "cca";
  std::size_t legs = 4;
  std::size_t top = 10;
  std::string out = ".";
  std::vector<std::string> inputs;
  bool svg = false;
  bool ratio = false;

  json to_json() const {
    json j;
    j["subcommand"] = subcommand;
    j["presets"] = presets;
    j["designs"] = designs;
    j["grid"] = grid ? json(*grid) : json(nullptr);
    j["angles"] = angles ? json(*angles) : json(nullptr);
    j["mode"] = mode ? json(*mode) : json(nullptr);
    j["psi_deg"] = psi_deg ? json(*psi_deg) : json(nullptr);
    j["ptotal"] = ptotal ? json(*ptotal) : json(nullptr);
    j["step"] = step ? json(*step) : json(nullptr);
    j["objective"] = objective;
    j["legs"] = legs;
    j["top"] = top;
    j["out"] = out;
    j["inputs"] = inputs;
    j["svg"] = svg;
    j["ratio"] = ratio;
    return j;
  }
};

class UsageError : public std::runtime_error {
 public:
  UsageError(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<ConverterDesign> load_designs(const RunConfig& cfg) {
  std::vector<ConverterDesign> out;
  for (const auto& name : cfg.presets) {
    auto d = catalog::find(name);
    if (!d) throw UsageError(kUsage, "unknown preset '" + name + "'");
    out.push_back(*d);
  }
  for (const auto& path : cfg.designs) out.push_back(io::load_design(path));
  return out;
}

inline fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw UsageError(kUsage, "cannot create output directory " + cfg.out);
  return dir;
}

inline double psi_radians(double deg) {
  if (!(deg >= 0.0 && deg < 360.0)) throw UsageError(kUsage, "--psi must lie in [0, 360)");
  return deg * kPi / 180.0;
}

inline std::string tag(double v) {
  std::string s = io::fmt(v);
  for (char& c : s)
    if (c == '-') c = 'm';
  return s;
}

inline void require_designs(const std::vector<ConverterDesign>& designs) {
  if (designs.empty()) throw UsageError(kUsage, "give at least one --preset or --design");
}

inline void write_svg(const fs::path& path, const svg::Figure& fig, std::ostream& log) {
  io::write_text(path, svg::render(fig));
  log << "wrote " << path.string() << '\n';
}

inline std::vector<BoundaryTrace> planar_references() {
  return {planar_trace(CapabilityChart(catalog::omega())),
          planar_trace(CapabilityChart(catalog::uniform_fixed(4)))};
}

inline std::vector<BoundaryTrace> cylindrical_references(double total) {
  return {cylindrical_trace(CapabilityChart(catalog::omega()), total),
          cylindrical_trace(CapabilityChart(catalog::uniform_fixed(4)), total)};
}

inline std::vector<BoundaryTrace> meridian_references(double psi) {
  return {spherical_trace(CapabilityChart(catalog::omega()), psi),
          spherical_trace(CapabilityChart(catalog::uniform_fixed(4)), psi)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// render

/// Renders the SVG figures for a result sidecar written by this tool.
inline int run_render_file(const fs::path& sidecar, const fs::path& dir, std::ostream& log) {
  const json meta = io::read_json_file(sidecar, ErrorKind::malformed_result);
  auto bad = [&](const std::string& why) {
    throw Error(ErrorKind::malformed_result, sidecar.string() + ": " + why);
  };
  if (!meta.is_object() || !meta.contains("kind") || !meta["kind"].is_string()) bad("missing 'kind'");
  if (!meta.contains("csv") || !meta["csv"].is_string()) bad("missing 'csv'");
  if (!meta.contains("design") || !meta["design"].is_object()) bad("missing 'design'");
  const std::string kind = meta["kind"];
  const fs::path csv = sidecar.parent_path() / meta["csv"].get<std::string>();
  std::ifstream in(csv, std::ios::binary);
  if (!in) bad("cannot read " + csv.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string name = meta["design"].value("name", std::string("design"));
  const std::string stem = sidecar.stem().string();

  if (kind == "boundary") {
    if (!meta.contains("mode") || !meta["mode"].is_string()) bad("missing 'mode'");
    const std::string mode = meta["mode"];
    BoundaryTrace trace = io::parse_boundary_csv(text);
    trace.design = name;
    if (mode == "planar") {
      if (trace.mode != DirectionMode::planar) bad("planar sidecar with spherical CSV");
      const auto refs = detail::planar_references();
      for (auto c : {svg::Coordinates::alpha_beta, svg::Coordinates::nominal})
        detail::write_svg(dir / (stem + "_" + svg::to_string(c) + ".svg"),
                          svg::boundary_figure(trace, refs, c), log);
    } else if (mode == "cylindrical") {
      if (trace.mode != DirectionMode::planar) bad("cylindrical sidecar with spherical CSV");
      if (!meta.contains("ptotal") || !meta["ptotal"].is_number()) bad("missing 'ptotal'");
      trace.mode = DirectionMode::cylindrical;
      trace.total_power = meta["ptotal"].get<double>();
      const auto refs = detail::cylindrical_references(*trace.total_power);
      for (auto c : {svg::Coordinates::alpha_beta, svg::Coordinates::nominal})
        detail::write_svg(dir / (stem + "_" + svg::to_string(c) + ".svg"),
                          svg::boundary_figure(trace, refs, c), log);
    } else if (mode == "spherical") {
      if (trace.mode != DirectionMode::spherical) bad("spherical sidecar with planar CSV");
      if (!meta.contains("psi_rad") || !meta["psi_rad"].is_number()) {
        log << "full-sphere traces have no 2D rendering; nothing drawn\n";
        return kOk;
      }
      const double psi = meta["psi_rad"];
      detail::write_svg(dir / (stem + "_abg.svg"),
                        svg::boundary_figure(trace, detail::meridian_references(psi),
                                             svg::Coordinates::alpha_beta),
                        log);
    } else {
      bad("unknown boundary mode '" + mode + "'");
    }
    return kOk;
  }
  if (kind == "slice") {
    if (!meta.contains("p_ttl") || !meta["p_ttl"].is_number()) bad("missing 'p_ttl'");
    const double total = meta["p_ttl"];
    SliceMask mask = io::parse_slice_csv(text, total);
    if (meta.contains("features") && meta["features"].is_array()) {
      for (const auto& f : meta["features"]) {
        if (!f.is_object() || !f.contains("start") || !f.contains("end")) bad("bad feature entry");
        IsolatedFeature feat;
        feat.kind = f.value("kind", std::string("point")) == "segment" ? IsolatedFeature::Kind::segment
                                                                        : IsolatedFeature::Kind::point;
        feat.wire = f.value("wire", 0);
        feat.start = {f["start"][0].get<double>(), f["start"][1].get<double>()};
        feat.end = {f["end"][0].get<double>(), f["end"][1].get<double>()};
        mask.features.push_back(feat);
      }
    }
    const auto refs = detail::cylindrical_references(total);
    for (auto c : {svg::Coordinates::alpha_beta, svg::Coordinates::nominal})
      detail::write_svg(dir / (stem + "_" + svg::to_string(c) + ".svg"),
                        svg::slice_figure(mask, name, refs, c), log);
    return kOk;
  }
  bad("unknown result kind '" + kind + "'");
  return kMalformedResult;
}

// ---------------------------------------------------------------------------
// computations

inline int run_area(const RunConfig& cfg, std::ostream& log) {
  const auto designs = detail::load_designs(cfg);
  detail::require_designs(designs);
  if (cfg.ratio && designs.size() != 2) throw UsageError(kUsage, "--ratio needs exactly two designs");
  const fs::path dir = detail::out_dir(cfg);
  const GridSpec grid{cfg.grid.value_or(801), 1.0};
  const int angles = cfg.angles.value_or(720);
  std::vector<double> bi;
  std::vector<double> gr;
  for (const auto& d : designs) {
    const CapabilityChart chart(d);
    const ChartMetrics g = cca_grid(chart, grid);
    const ChartMetrics b = cca_boundary_integral(chart, angles);
    const double rel = b.value > 0 ? std::abs(g.value - b.value) / b.value : std::abs(g.value);
    json j{{"config", cfg.to_json()},
           {"design", io::design_to_json(d)},
           {"cca_grid", io::round9(g.value)},
           {"cca_boundary_integral", io::round9(b.value)},
           {"relative_difference", io::round9(rel)},
           {"grid_resolution", grid.resolution},
           {"angles", angles}};
    const fs::path path = dir / (d.name() + "_cca.json");
    io::save_json(path, j);
    log << d.name() << ": cca grid " << io::fmt(g.value) << ", boundary " << io::fmt(b.value)
        << " pu^2 -> " << path.string() << '\n';
    gr.push_back(g.value);
    bi.push_back(b.value);
    if (cfg.svg)
      detail::write_svg(dir / (d.name() + "_cca_abg.svg"),
                        svg::boundary_figure(planar_trace(chart), detail::planar_references(),
                                             svg::Coordinates::alpha_beta),
                        log);
  }
  if (cfg.ratio) {
    // how much larger the second design must be to match the first
    const double eta_b = size_ratio(bi[1], bi[0], MetricKind::area);
    const double eta_g = size_ratio(gr[1], gr[0], MetricKind::area);
    json j{{"config", cfg.to_json()},
           {"reference", designs[1].name()},
           {"target", designs[0].name()},
           {"eta_a_boundary_integral", io::round9(eta_b)},
           {"eta_a_grid", io::round9(eta_g)}};
    const fs::path path = dir / (designs[0].name() + "_" + designs[1].name() + "_eta_a.json");
    io::save_json(path, j);
    log << "eta_A(" << designs[1].name() << " -> " << designs[0].name() << ") = " << io::fmt(eta_b)
        << " (grid " << io::fmt(eta_g) << ") -> " << path.string() << '\n';
  }
  return kOk;
}

inline int run_volume(const RunConfig& cfg, std::ostream& log) {
  const auto designs = detail::load_designs(cfg);
  detail::require_designs(designs);
  if (cfg.ratio && designs.size() != 2) throw UsageError(kUsage, "--ratio needs exactly two designs");
  const fs::path dir = detail::out_dir(cfg);
  const GridSpec grid{cfg.grid.value_or(201), 1.0};
  const int n_theta = cfg.angles.value_or(180);
  std::vector<double> sph, gr;
  for (const auto& d : designs) {
    const CapabilityChart chart(d);
    const ChartMetrics g = ccv_grid(chart, grid);
    const ChartMetrics s = ccv_spherical_integral(chart, n_theta, 2 * n_theta);
    const double rel = s.value > 0 ? std::abs(g.value - s.value) / s.value : std::abs(g.value);
    json j{{"config", cfg.to_json()},
           {"design", io::design_to_json(d)},
           {"ccv_grid", io::round9(g.value)},
           {"ccv_spherical_integral", io::round9(s.value)},
           {"relative_difference", io::round9(rel)},
           {"grid_resolution", grid.resolution},
           {"sphere", {n_theta, 2 * n_theta}}};
    const fs::path path = dir / (d.name() + "_ccv.json");
    io::save_json(path, j);
    log << d.name() << ": ccv grid " << io::fmt(g.value) << ", spherical " << io::fmt(s.value)
        << " pu^3 -> " << path.string() << '\n';
    gr.push_back(g.value);
    sph.push_back(s.value);
  }
  if (cfg.ratio) {
    const double eta_s = size_ratio(sph[1], sph[0], MetricKind::volume);
    const double eta_g = size_ratio(gr[1], gr[0], MetricKind::volume);
    json j{{"config", cfg.to_json()},
           {"reference", designs[1].name()},
           {"target", designs[0].name()},
           {"eta_v_spherical_integral", io::round9(eta_s)},
           {"eta_v_grid", io::round9(eta_g)}};
    const fs::path path = dir / (designs[0].name() + "_" + designs[1].name() + "_eta_v.json");
    io::save_json(path, j);
    log << "eta_V(" << designs[1].name() << " -> " << designs[0].name() << ") = " << io::fmt(eta_s)
        << " (grid " << io::fmt(eta_g) << ") -> " << path.string() << '\n';
  }
  return kOk;
}

inline int run_boundary(const RunConfig& cfg, std::ostream& log) {
  const std::string mode = cfg.mode.value_or("planar");
  if (mode != "planar" && mode != "spherical" && mode != "cylindrical")
    throw UsageError(kUsage, "--mode must be planar, spherical or cylindrical");
  if (cfg.ptotal && mode != "cylindrical")
    throw UsageError(kConflictingFlags, "--ptotal applies only to --mode cylindrical");
  if (cfg.psi_deg && mode != "spherical")
    throw UsageError(kConflictingFlags, "--psi applies only to --mode spherical");
  if (mode == "cylindrical" && !cfg.ptotal)
    throw UsageError(kUsage, "--mode cylindrical needs --ptotal");
  const auto designs = detail::load_designs(cfg);
  detail::require_designs(designs);
  const fs::path dir = detail::out_dir(cfg);

  for (const auto& d : designs) {
    const CapabilityChart chart(d);
    BoundaryTrace trace;
    json meta{{"kind", "boundary"}, {"config", cfg.to_json()}, {"design", io::design_to_json(d)},
              {"mode", mode}};
    std::string stem = d.name() + "_boundary_" + mode;
    if (mode == "planar") {
      trace = planar_trace(chart, cfg.angles.value_or(720));
    } else if (mode == "cylindrical") {
      if (!(std::abs(*cfg.ptotal) <= 1.0)) throw UsageError(kUsage, "--ptotal must lie in [-1, 1]");
      trace = cylindrical_trace(chart, *cfg.ptotal, cfg.angles.value_or(720));
      meta["ptotal"] = *cfg.ptotal;
      stem += "_p" + detail::tag(*cfg.ptotal);
    } else if (cfg.psi_deg) {
      const double psi = detail::psi_radians(*cfg.psi_deg);
      trace = spherical_trace(chart, psi, cfg.angles.value_or(361));
      meta["psi_rad"] = psi;
      stem += "_psi" + detail::tag(*cfg.psi_deg);
    } else {
      const int n_theta = cfg.angles.value_or(180);
      trace = sphere_trace(chart, n_theta, 2 * n_theta);
    }
    meta["csv"] = stem + ".csv";
    meta["samples"] = trace.samples.size();
    io::write_text(dir / (stem + ".csv"), io::boundary_csv(trace));
    io::save_json(dir / (stem + ".json"), meta);
    log << d.name() << ": " << trace.samples.size() << " boundary samples -> "
        << (dir / (stem + ".csv")).string() << '\n';
    if (cfg.svg) run_render_file(dir / (stem + ".json"), dir, log);
  }
  return kOk;
}

inline int run_slice(const RunConfig& cfg, std::ostream& log) {
  if (cfg.mode && *cfg.mode != "cylindrical")
    throw UsageError(kConflictingFlags, "slices are cylindrical; --mode " + *cfg.mode + " conflicts");
  if (cfg.psi_deg) throw UsageError(kConflictingFlags, "--psi does not apply to slices");
  if (!cfg.ptotal) throw UsageError(kUsage, "slice needs --ptotal");
  if (!(std::abs(*cfg.ptotal) <= 1.0)) throw UsageError(kUsage, "--ptotal must lie in [-1, 1]");
  const auto designs = detail::load_designs(cfg);
  detail::require_designs(designs);
  const fs::path dir = detail::out_dir(cfg);
  const GridSpec grid{cfg.grid.value_or(801), 1.0};
  for (const auto& d : designs) {
    const SliceMask mask = slice(CapabilityChart(d), *cfg.ptotal, grid);
    const std::string stem = d.name() + "_slice_p" + detail::tag(*cfg.ptotal);
    json meta{{"kind", "slice"},
              {"p_ttl", *cfg.ptotal},
              {"components", mask.components},
              {"holes", mask.holes},
              {"cca_of_slice", io::round9(mask.area)},
              {"features", io::features_to_json(mask.features)},
              {"grid_resolution", grid.resolution},
              {"csv", stem + ".csv"},
              {"design", io::design_to_json(d)},
              {"config", cfg.to_json()}};
    io::write_text(dir / (stem + ".csv"), io::slice_csv(mask));
    io::save_json(dir / (stem + ".json"), meta);
    log << d.name() << ": P_Ttl " << io::fmt(*cfg.ptotal) << ", " << mask.components
        << " component(s), " << mask.holes << " hole(s), " << mask.features.size()
        << " isolated feature(s) -> " << (dir / (stem + ".json")).string() << '\n';
    if (cfg.svg) run_render_file(dir / (stem + ".json"), dir, log);
  }
  return kOk;
}

inline int run_optimize(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.presets.empty() || !cfg.designs.empty())
    throw UsageError(kConflictingFlags, "optimize searches designs; --preset/--design conflict");
  if (cfg.objective != "cca" && cfg.objective != "ccv")
    throw UsageError(kUsage, "--objective must be cca or ccv");
  SizingProblem problem;
  problem.legs = cfg.legs;
  problem.objective = cfg.objective == "cca" ? Objective::cca : Objective::ccv;
  problem.step = cfg.step.value_or(0.02);
  problem.top_k = cfg.top;
  if (cfg.angles) {
    problem.angles = *cfg.angles;
    problem.sphere_theta = *cfg.angles;
    problem.sphere_psi = 2 * *cfg.angles;
  }
  if (cfg.grid) {
    problem.validation_grid = *cfg.grid;
    problem.validation_grid_3d = *cfg.grid;
  }
  const fs::path dir = detail::out_dir(cfg);
  const SizingResult res = optimize_sizing(problem);
  const std::string stem = "opt_" + cfg.objective + "_m" + std::to_string(cfg.legs);

  json design = io::design_to_json(ConverterDesign::reconfigurable(stem, res.alpha));
  design["config"] = cfg.to_json();
  io::save_json(dir / (stem + ".json"), design);

  std::ostringstream csv;
  for (std::size_t i = 0; i < cfg.legs; ++i) csv << "alpha" << i + 1 << ',';
  csv << "metric\n";
  for (const auto& c : res.top) {
    for (double a : c.alpha) csv << io::fmt(a) << ',';
    csv << io::fmt(c.metric) << '\n';
  }
  io::write_text(dir / (stem + "_top.csv"), csv.str());

  json ties = json::array();
  for (const auto& c : res.near_ties) ties.push_back({{"alpha", c.alpha}, {"metric", io::round9(c.metric)}});
  json summary{{"config", cfg.to_json()},
               {"alpha", res.alpha},
               {"metric", io::round9(res.metric)},
               {"validation_grid_metric", io::round9(res.validation_metric)},
               {"evaluated", res.evaluated},
               {"near_ties", ties}};
  io::save_json(dir / (stem + "_summary.json"), summary);

  log << "optimum alpha = (";
  for (std::size_t i = 0; i < res.alpha.size(); ++i) log << (i ? ", " : "") << io::fmt(res.alpha[i]);
  log << "), " << cfg.objective << " " << io::fmt(res.metric) << " (grid " << io::fmt(res.validation_metric)
      << "), " << res.evaluated << " candidates -> " << (dir / (stem + ".json")).string() << '\n';
  return kOk;
}

inline int run_ratio(const RunConfig& cfg, std::ostream& log) {
  if (cfg.objective != "cca" && cfg.objective != "ccv")
    throw UsageError(kUsage, "--objective must be cca or ccv");
  const auto designs = detail::load_designs(cfg);
  if (designs.size() != 2) throw UsageError(kUsage, "ratio needs exactly two designs");
  const fs::path dir = detail::out_dir(cfg);
  const bool area = cfg.objective == "cca";
  std::vector<double> v;
  for (const auto& d : designs) {
    const CapabilityChart chart(d);
    const int n = cfg.angles.value_or(area ? 720 : 180);
    v.push_back(area ? cca_boundary_integral(chart, n).value
                     : ccv_spherical_integral(chart, n, 2 * n).value);
  }
  const double eta = size_ratio(v[1], v[0], area ? MetricKind::area : MetricKind::volume);
  json j{{"config", cfg.to_json()},
         {"reference", designs[1].name()},
         {"target", designs[0].name()},
         {"objective", cfg.objective},
         {"metric_target", io::round9(v[0])},
         {"metric_reference", io::round9(v[1])},
         {"eta", io::round9(eta)}};
  const fs::path path = dir / (designs[0].name() + "_" + designs[1].name() + "_ratio.json");
  io::save_json(path, j);
  log << "eta_" << (area ? "A" : "V") << "(" << designs[1].name() << " -> " << designs[0].name()
      << ") = " << io::fmt(eta) << " -> " << path.string() << '\n';
  return kOk;
}

inline int run_render(const RunConfig& cfg, std::ostream& log) {
  if (cfg.inputs.empty()) throw UsageError(kUsage, "render needs --input FILE");
  const fs::path dir = detail::out_dir(cfg);
  for (const auto& in : cfg.inputs) {
    try {
      run_render_file(in, dir, log);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::not_found || e.kind() == ErrorKind::schema)
        throw Error(ErrorKind::malformed_result, e.what());
      throw;
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

inline int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::not_found: return kMissingFile;
    case ErrorKind::schema: return kBadSchema;
    case ErrorKind::malformed_result: return kMalformedResult;
    default: return kUsage;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Capability charts of reconfigurable four-wire converters", "ccchart"};
  app.require_subcommand(1);
  RunConfig cfg;
  double psi = 0, ptotal = 0, step = 0;
  int grid = 0, angles = 0;
  std::string mode;

  auto common = [&](CLI::App* sub, bool designs) {
    if (designs) {
      sub->add_option("--preset", cfg.presets, "Built-in design: s4opt, i4opt, ufix3, ufix4, omega, u<m>");
      sub->add_option("--design", cfg.designs, "Design JSON file");
    }
    sub->add_option("--grid", grid, "Grid points per axis (odd, >= 21)");
    sub->add_option("--angles", angles, "Angle samples (polar angles for spheres)");
    sub->add_option("--mode", mode, "planar | spherical | cylindrical");
    sub->add_option("--psi", psi, "Azimuth in degrees");
    sub->add_option("--ptotal", ptotal, "Total power P_Ttl in pu");
    sub->add_option("--step", step, "Simplex step in pu");
    sub->add_option("--objective", cfg.objective, "cca | ccv");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_flag("--svg", cfg.svg, "Also render SVG figures");
  };
  CLI::App* area = app.add_subcommand("area", "Standalone chart area (grid and boundary integral)");
  common(area, true);
  area->add_flag("--ratio", cfg.ratio, "Size ratio eta_A of two designs");
  CLI::App* volume = app.add_subcommand("volume", "Interconnected chart volume");
  common(volume, true);
  volume->add_flag("--ratio", cfg.ratio, "Size ratio eta_V of two designs");
  CLI::App* boundary = app.add_subcommand("boundary", "Boundary radius traces (CSV)");
  common(boundary, true);
  CLI::App* slice_cmd = app.add_subcommand("slice", "Fixed-P_Ttl slice mask and topology");
  common(slice_cmd, true);
  CLI::App* optimize = app.add_subcommand("optimize", "Search leg capacities maximising CCA or CCV");
  common(optimize, true);
  optimize->add_option("--legs", cfg.legs, "Leg count m");
  optimize->add_option("--top", cfg.top, "Candidates kept in the top-k CSV");
  CLI::App* ratio = app.add_subcommand("ratio", "Size ratio of two designs");
  common(ratio, true);
  CLI::App* render = app.add_subcommand("render", "SVG figures from result sidecar files");
  common(render, false);
  render->add_option("--input", cfg.inputs, "Result sidecar JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  if (sub->count("--grid")) cfg.grid = grid;
  if (sub->count("--angles")) cfg.angles = angles;
  if (sub->count("--mode")) cfg.mode = mode;
  if (sub->count("--psi")) cfg.psi_deg = psi;
  if (sub->count("--ptotal")) cfg.ptotal = ptotal;
  if (sub->count("--step")) cfg.step = step;

  try {
    if (cfg.subcommand != "boundary" && cfg.subcommand != "slice") {
      if (cfg.mode) throw UsageError(kConflictingFlags, "--mode applies to boundary and slice only");
      if (cfg.psi_deg) throw UsageError(kConflictingFlags, "--psi applies to boundary only");
      if (cfg.ptotal) throw UsageError(kConflictingFlags, "--ptotal applies to boundary and slice only");
    }
    if (cfg.step && cfg.subcommand != "optimize")
      throw UsageError(kConflictingFlags, "--step applies to optimize only");
    if (cfg.subcommand == "area") return run_area(cfg, out);
    if (cfg.subcommand == "volume") return run_volume(cfg, out);
    if (cfg.subcommand == "boundary") return run_boundary(cfg, out);
    if (cfg.subcommand == "slice") return run_slice(cfg, out);
    if (cfg.subcommand == "optimize") return run_optimize(cfg, out);
    if (cfg.subcommand == "ratio") return run_ratio(cfg, out);
    if (cfg.subcommand == "render") return run_render(cfg, out);
  } catch (const UsageError& e) {
    err << "ccchart: " << e.what() << '\n';
    return e.code();
  } catch (const Error& e) {
    err << "ccchart: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "ccchart: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace ccchart::cli
