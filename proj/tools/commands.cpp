#include <png.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>

#include "affdim/attractor.hpp"
#include "affdim/error.hpp"
#include "affdim/gallery.hpp"
#include "affdim/linalg.hpp"
#include "affdim/pressure.hpp"
#include "affdim/structure.hpp"
#include "cli.hpp"
#include "config.hpp"
#include "report.hpp"

#ifndef AFFDIM_VERSION
#define AFFDIM_VERSION "unknown"
#endif

namespace affdim::cli {

using nlohmann::json;

namespace {

// Everything that determines the numbers in a report. Serialised into the
// report so `report --rerun` can replay the run exactly.
struct Options {
  std::string command;
  std::size_t level = 8;
  double tol = 1e-4;
  std::uint64_t seed = 0x5EED;
  std::size_t shards = 1;
  std::uint64_t budget = kDefaultWordBudget;
  std::vector<std::size_t> k;
  std::size_t max_len = 4;
  double margin = 1e-3;
  std::size_t retries = 8;
  std::vector<std::string> certs;
  double radius = 0.0;
  std::vector<double> center;
  std::vector<std::vector<double>> a;
  std::vector<std::vector<double>> b;
  std::size_t angles = 16;
  bool empirical = true;
  std::string mode = "chaos";
  std::uint64_t count = 200'000;
  std::size_t depth = 10;
  std::vector<std::string> coords;
  std::vector<std::string> images;
  std::size_t width = 512;
  std::size_t height = 512;
  int finest = 10;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Options, command, level, tol, seed, shards, budget, k, max_len, margin,
                                                retries, certs, radius, center, a, b, angles, empirical, mode, count,
                                                depth, coords, images, width, height, finest)

// Flags that only affect presentation.
struct Presentation {
  std::string format = "table";
  std::string out;
  bool omit_timing = false;
  std::string config_path;
  std::string a_text;
  std::string b_text;
  std::string seed_text;
  std::string report_path;
  bool rerun = false;
};

struct Outcome {
  json results;
  int code = kOk;
  std::string status = "ok";
};

PressureOptions pressure_options(const Options& o) {
  PressureOptions p;
  p.shards = o.shards;
  p.budget = o.budget;
  return p;
}

json bisection_tolerances(const Options& o) {
  return {{"bisection_tol", o.tol},
          {"bisection_max_iterations", kMaxBisectionIterations},
          {"svd_jacobi_tol", kJacobiTolerance},
          {"svd_max_sweeps", kMaxJacobiSweeps}};
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) { return Matrix::from_rows(rows); }

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) rows.emplace_back(m.row(r).begin(), m.row(r).end());
  return rows;
}

IFSConfig require_config(const std::optional<json>& config, const std::string& command) {
  if (!config) throw ConfigError(command + ": a config file is required");
  return parse_config(*config);
}

Outcome run_dim(const Options& o, const IFSConfig& cfg) {
  const auto b = affinity_dimension(cfg.tuple(), o.level, o.tol, pressure_options(o));
  return {{{"affinity_dimension", encode(b)}, {"tolerances", bisection_tolerances(o)}}};
}

// Verifies that the config's maps really are A_i (x) B_i before trusting the
// factor-based bound.
void check_kronecker(const IFSConfig& cfg) {
  const auto& f = *cfg.kronecker;
  for (std::size_t i = 0; i < cfg.linear.size(); ++i) {
    const Matrix k = kronecker(f.a[i], f.b[i]);
    if (k.rows() != cfg.dimension || max_abs_diff(k, cfg.linear[i]) > 1e-12)
      throw ConfigError("config/kronecker: map " + std::to_string(i + 1) + " is not A_" + std::to_string(i + 1) +
                        " (x) B_" + std::to_string(i + 1));
  }
}

Outcome run_projdim(const Options& o, const IFSConfig& cfg) {
  Matrix q;
  std::string source;
  if (!o.coords.empty()) {
    q = coordinate_projection(o.coords.front(), cfg.dimension);
    source = "coordinates " + o.coords.front();
  } else if (cfg.projection) {
    q = *cfg.projection;
    source = "config";
  } else {
    throw ConfigError("projdim: no projection; pass --coords i,j or add a 'projection' field to the config");
  }
  const auto pe = projected_exponent(cfg.tuple(), q, o.level, o.tol, pressure_options(o));
  json results = {{"projection", matrix_to_json(q)},
                  {"projection_source", source},
                  {"projection_rank", pe.projection_rank},
                  {"projected", encode(pe.empirical)},
                  {"unprojected", encode(pe.unprojected)},
                  {"crude_bound", pe.crude_bound},
                  {"gap", pe.unprojected.upper - pe.empirical.upper},
                  {"tolerances", bisection_tolerances(o)}};
  if (cfg.kronecker) {
    check_kronecker(cfg);
    const auto& f = *cfg.kronecker;
    const auto kb = kron_projected_bound(MatrixTuple(f.a), MatrixTuple(f.b), f.p, o.level, o.tol, pressure_options(o));
    results["kron_projected_bound"] = encode(kb);
    results["kron_projection_p"] = matrix_to_json(f.p);
  }
  return {results};
}

Outcome run_check(const Options& o, const IFSConfig& cfg) {
  std::vector<std::size_t> ks = o.k;
  if (ks.empty())
    for (std::size_t k = 1; k <= cfg.dimension; ++k) ks.push_back(k);
  const std::vector<std::string> certs =
      o.certs.empty() ? std::vector<std::string>{"proximality", "irreducibility"} : o.certs;
  const MatrixTuple tuple = cfg.tuple();
  json list = json::array();
  bool all = true;
  const auto add = [&](const CertificateReport& r) {
    all = all && r.certified();
    list.push_back(encode(r));
  };
  for (const auto& c : certs) {
    if (c == "proximality") {
      for (std::size_t k : ks) add(proximality_check(tuple, k, o.max_len, o.margin, o.budget));
    } else if (c == "irreducibility") {
      for (std::size_t k : ks) add(irreducibility_check(tuple, k, o.retries, o.seed + k));
    } else if (c == "separation") {
      if (!(o.radius > 0.0)) throw ConfigError("check: separation needs --radius > 0");
      const Vector center = o.center.empty() ? Vector(cfg.dimension, 0.0) : o.center;
      add(strong_separation_certificate(cfg.ifs(), center, o.radius));
    } else {
      throw ConfigError("check: unknown certificate '" + c + "' (proximality, irreducibility, separation)");
    }
  }
  Outcome out{{{"certificates", list}, {"all_certified", all}}};
  if (!all) {
    out.code = kNotCertified;
    out.status = "not certified";
  }
  return out;
}

Outcome run_certify(const Options& o) {
  const Matrix a = o.a.empty() ? admissible_a() : rows_to_matrix(o.a);
  const Matrix b = o.b.empty() ? admissible_b() : rows_to_matrix(o.b);
  Theorem3Options t;
  t.level = o.level;
  t.tol = o.tol;
  t.seed = o.seed;
  t.angles = o.angles;
  t.proximality_max_len = o.max_len;
  t.empirical_sweep = o.empirical;
  t.pressure = pressure_options(o);
  const auto report = certify_theorem3(build_theorem3(a, b), t);
  Outcome out{{{"a", matrix_to_json(a)},
               {"b", matrix_to_json(b)},
               {"theorem3", encode(report)},
               {"tolerances", bisection_tolerances(o)}}};
  if (!report.all_pass) {
    out.code = kNotCertified;
    out.status = "not certified";
  }
  return out;
}

void write_png(const GrayImage& img, const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw IoError("cannot open '" + path + "' for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("failed writing '" + path + "'");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < img.height; ++r)
    png_write_row(png, const_cast<png_bytep>(img.pixels.data() + r * img.width));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw IoError("failed writing '" + path + "'");
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Outcome run_sampling(const Options& o, const IFSConfig& cfg, bool render_images) {
  SamplingMode mode;
  if (o.mode == "chaos") {
    mode = ChaosMode{o.count, o.seed};
  } else if (o.mode == "deterministic") {
    mode = DeterministicMode{o.depth, o.budget};
  } else {
    throw ConfigError("--mode must be 'chaos' or 'deterministic', got '" + o.mode + "'");
  }
  const PointCloud cloud = sample_attractor(cfg.ifs(), mode);

  struct Panel {
    std::string label;
    std::optional<Matrix> q;
  };
  std::vector<Panel> panels;
  for (const auto& c : o.coords) panels.push_back({"coordinates " + c, coordinate_projection(c, cfg.dimension)});
  if (panels.empty() && cfg.projection) panels.push_back({"config projection", cfg.projection});
  if (panels.empty()) {
    if (cfg.dimension != 2)
      throw ConfigError("a " + std::to_string(cfg.dimension) +
                        "-dimensional system needs --coords i,j or a 'projection' field");
    panels.push_back({"identity", std::nullopt});
  }
  if (render_images && o.images.size() != panels.size())
    throw ConfigError("render: pass one --image path per panel (" + std::to_string(panels.size()) + " panels, " +
                      std::to_string(o.images.size()) + " images)");

  json list = json::array();
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const PointCloud plane = panels[i].q ? project_points(cloud, *panels[i].q) : cloud;
    json entry = {{"label", panels[i].label}};
    if (panels[i].q) entry["projection"] = matrix_to_json(*panels[i].q);
    if (render_images) {
      const GrayImage img = rasterize(plane, ImageSpec{o.width, o.height, std::nullopt});
      if (ends_with(o.images[i], ".png")) {
        write_png(img, o.images[i]);
      } else {
        write_pgm(img, o.images[i]);
      }
      entry["image"] = {{"path", o.images[i]},
                        {"width", img.width},
                        {"height", img.height},
                        {"occupied_pixels", img.occupied},
                        {"max_hits", img.max_hits},
                        {"bounds", {img.bounds.xmin, img.bounds.xmax, img.bounds.ymin, img.bounds.ymax}},
                        {"density_mapping", "log(1 + hits) / log(1 + max hits)"}};
      try {
        entry["box_count"] = encode(box_count(plane, o.finest));
      } catch (const EstimationError& e) {
        entry["box_count_error"] = e.what();
      }
    } else {
      entry["box_count"] = encode(box_count(plane, o.finest));
    }
    list.push_back(entry);
  }
  return {{{"sampling", encode(cloud.provenance())},
           {"panels", list},
           {"tolerances",
            {{"box_count_min_level", kMinBoxLevel},
             {"box_count_finest_level", o.finest},
             {"box_count_retention", "counts <= points / 100"}}}}};
}

Outcome execute(const Options& o, const std::optional<json>& config) {
  if (o.command == "dim") return run_dim(o, require_config(config, o.command));
  if (o.command == "projdim") return run_projdim(o, require_config(config, o.command));
  if (o.command == "check") return run_check(o, require_config(config, o.command));
  if (o.command == "certify-example") return run_certify(o);
  if (o.command == "render") return run_sampling(o, require_config(config, o.command), true);
  if (o.command == "boxdim") return run_sampling(o, require_config(config, o.command), false);
  throw ConfigError("unknown command '" + o.command + "'");
}

json make_report(const Options& o, const std::optional<json>& config, const std::vector<std::string>& args,
                 const Outcome& outcome) {
  json invocation = {{"options", o}, {"config", config ? *config : json()}};
  return {{"tool", "affdim"},
          {"version", AFFDIM_VERSION},
          {"command", o.command},
          {"argv", args},
          {"invocation", invocation},
          {"input_digest", digest(invocation)},
          {"seed", o.seed},
          {"shards", o.shards},
          {"budget", o.budget},
          {"results", outcome.results},
          {"status", outcome.status},
          {"exit_code", outcome.code}};
}

void emit(const json& report, const Presentation& p, std::ostream& out) {
  if (!p.out.empty()) {
    std::ofstream f(p.out);
    if (!f) throw IoError("cannot open '" + p.out + "' for writing");
    f << report.dump(2) << '\n';
    if (!f) throw IoError("failed writing '" + p.out + "'");
  }
  if (p.format == "json") {
    out << report.dump(2) << '\n';
  } else {
    // The echoed invocation is for replay; the table shows results only.
    json shown = report;
    shown.erase("invocation");
    print_table(shown, out);
  }
}

int run_report(const Presentation& p, std::ostream& out) {
  const json stored = load_json(p.report_path);
  if (!stored.is_object() || !stored.contains("invocation") || !stored.contains("results"))
    throw ConfigError(p.report_path + ": not a run report");
  if (!p.rerun) {
    emit(stored, p, out);
    return kOk;
  }
  const json& inv = stored["invocation"];
  const Options o = inv.at("options").get<Options>();
  std::optional<json> config;
  if (!inv.at("config").is_null()) config = inv.at("config");
  const Outcome again = execute(o, config);
  const json diff = json::diff(stored["results"], again.results);
  std::vector<std::string> paths;
  for (const auto& op : diff) paths.push_back(op.at("path").get<std::string>());
  const bool identical = diff.empty();
  json report = {{"tool", "affdim"},
                 {"version", AFFDIM_VERSION},
                 {"command", "report"},
                 {"rerun_of", p.report_path},
                 {"input_digest", digest(inv)},
                 {"identical", identical},
                 {"differences", paths},
                 {"status", identical ? "ok" : "rerun mismatch"},
                 {"exit_code", identical ? kOk : kRerunMismatch}};
  emit(report, p, out);
  return identical ? kOk : kRerunMismatch;
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used, 0);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("--seed: '" + text + "' is not an unsigned integer (decimal or 0x hex)");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Affinity dimension, projected pressure and structure certificates for affine IFS", "affdim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(AFFDIM_VERSION));

  Options o;
  o.shards = default_shard_count();
  Presentation p;
  p.seed_text = "0x5EED";

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--level", o.level, "Word length n of the pressure envelope")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--tol", o.tol, "Bisection tolerance in s (at least 1e-6)")->capture_default_str();
    sub->add_option("--seed", p.seed_text, "Seed for randomised steps (decimal or 0x hex)")->capture_default_str();
    sub->add_option("--shards", o.shards, "Word-tree shards (default: available parallelism)")->check(CLI::PositiveNumber);
    sub->add_option("--budget", o.budget, "Maximum number of words enumerated")->capture_default_str();
    sub->add_option("--format", p.format, "Report format")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
    sub->add_option("--out", p.out, "Also write the JSON report to this file");
    sub->add_flag("--omit-timing", p.omit_timing, "Leave wall time out of the report");
  };
  const auto config_arg = [&](CLI::App* sub) {
    sub->add_option("config", p.config_path, "IFS config (JSON)")->required();
  };
  const auto sampling = [&](CLI::App* sub) {
    sub->add_option("--mode", o.mode, "chaos or deterministic")->check(CLI::IsMember({"chaos", "deterministic"}))->capture_default_str();
    sub->add_option("--count", o.count, "Chaos-game points")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--depth", o.depth, "Deterministic word length")->capture_default_str();
    sub->add_option("--coords", o.coords, "Panel as 1-based coordinate pair i,j (repeatable)");
    sub->add_option("--finest", o.finest, "Finest box-count level")->capture_default_str()->check(CLI::Range(kMinBoxLevel, kMaxBoxLevel));
  };

  auto* dim = app.add_subcommand("dim", "Affinity dimension upper bracket");
  common(dim);
  config_arg(dim);

  auto* projdim = app.add_subcommand("projdim", "Projected exponent and bounds for a projection Q");
  common(projdim);
  config_arg(projdim);
  projdim->add_option("--coords", o.coords, "Use the coordinate projection i,j instead of the config's")->expected(1);

  auto* check = app.add_subcommand("check", "Structure certificates");
  common(check);
  config_arg(check);
  check->add_option("--k", o.k, "Orders to check (default 1..d)")->delimiter(',');
  check->add_option("--max-len", o.max_len, "Longest word for the proximality search")->capture_default_str();
  check->add_option("--margin", o.margin, "Proximality margin")->capture_default_str();
  check->add_option("--retries", o.retries, "Irreducibility retries")->capture_default_str();
  check->add_option("--certs", o.certs, "proximality, irreducibility, separation")->delimiter(',');
  check->add_option("--radius", o.radius, "Ball radius for the separation certificate");
  check->add_option("--center", o.center, "Ball centre (default 0)")->delimiter(',');

  auto* certify = app.add_subcommand("certify-example", "Full pipeline for the tensor counterexample family");
  common(certify);
  certify->add_option("--A", p.a_text, "2x2 matrix A, inline JSON or file (default: built-in admissible pair)");
  certify->add_option("--B", p.b_text, "2x2 matrix B, inline JSON or file");
  certify->add_option("--angles", o.angles, "Projection sweep size")->capture_default_str();
  certify->add_option("--max-len", o.max_len, "Longest word for the proximality search")->capture_default_str();
  bool no_empirical = false;
  certify->add_flag("--no-empirical", no_empirical, "Skip the empirical projected exponent in the sweep");

  auto* render = app.add_subcommand("render", "Rasterise projected attractor samples");
  common(render);
  config_arg(render);
  sampling(render);
  render->add_option("--image", o.images, "Output image per panel (.pgm or .png)")->required();
  render->add_option("--width", o.width, "Image width")->capture_default_str();
  render->add_option("--height", o.height, "Image height")->capture_default_str();

  auto* boxdim = app.add_subcommand("boxdim", "Box-counting slope of projected attractor samples");
  common(boxdim);
  config_arg(boxdim);
  sampling(boxdim);

  auto* report = app.add_subcommand("report", "Show a saved run report, or re-run it and compare");
  report->add_option("report", p.report_path, "RunReport JSON")->required();
  report->add_flag("--rerun", p.rerun, "Re-execute and compare numbers bitwise");
  report->add_option("--format", p.format, "Report format")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
  report->add_option("--out", p.out, "Also write the JSON report to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  if (report->parsed()) return run_report(p, out);

  const auto start = std::chrono::steady_clock::now();
  o.command = app.get_subcommands().front()->get_name();
  o.seed = parse_seed(p.seed_text);
  o.empirical = !no_empirical;
  if (!p.a_text.empty()) o.a = matrix_to_rows(parse_matrix_argument(p.a_text, "--A"));
  if (!p.b_text.empty()) o.b = matrix_to_rows(parse_matrix_argument(p.b_text, "--B"));
  std::optional<json> config;
  if (!p.config_path.empty()) {
    config = load_json(p.config_path);
    parse_config(*config);  // validate before any work
  }

  const Outcome outcome = execute(o, config);
  json rep = make_report(o, config, args, outcome);
  if (!p.omit_timing)
    rep["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(rep, p, out);
  if (outcome.code != kOk) err << "affdim: " << outcome.status << '\n';
  return outcome.code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ConfigError& e) {
    err << "affdim: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    err << "affdim: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "affdim: precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const DomainError& e) {
    err << "affdim: precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const ShapeError& e) {
    err << "affdim: precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const ResourceError& e) {
    err << "affdim: budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const IoError& e) {
    err << "affdim: I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const NumericalError& e) {
    err << "affdim: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const EstimationError& e) {
    err << "affdim: estimation failed: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "affdim: error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace affdim::cli
