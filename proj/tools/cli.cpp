#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "nlfctn/completion.hpp"
#include "nlfctn/io.hpp"
#include "nlfctn/metrics.hpp"
#include "nlfctn/pipeline.hpp"

namespace nlfctn::cli {

const char* version() { return NLFCTN_VERSION; }

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Keys a manifest carries that are results rather than parameters; they are
// ignored when the manifest is fed back through --config.
const std::set<std::string> kMetaKeys{"command", "version", "outputs", "timings", "metrics", "report", "table"};

enum class Kind { Uint, Real, Text, Path, UintList, RealList };

struct Param {
  std::string key;
  Kind kind;
  json fallback;
  std::string help;
};

std::string dashed(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return key;
}

std::uint64_t parse_uint(std::string_view s, const std::string& key) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument(key + ": expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s, const std::string& key) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument(key + ": expected a number, got '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    parts.push_back(s.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

json convert(const Param& p, const std::string& s) {
  switch (p.kind) {
    case Kind::Uint:
      return parse_uint(s, p.key);
    case Kind::Real:
      return parse_real(s, p.key);
    case Kind::Text:
      return s;
    case Kind::Path:
      return fs::absolute(s).lexically_normal().string();
    case Kind::UintList: {
      json a = json::array();
      for (auto part : split_commas(s)) a.push_back(parse_uint(part, p.key));
      return a;
    }
    case Kind::RealList: {
      json a = json::array();
      for (auto part : split_commas(s)) a.push_back(parse_real(part, p.key));
      return a;
    }
  }
  return nullptr;
}

// A subcommand's declared parameters and the raw strings CLI11 fills in.
struct Command {
  std::string name;
  CLI::App* app = nullptr;
  std::vector<Param> params;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;

  Command(CLI::App& parent, std::string n, const std::string& description) : name(std::move(n)) {
    app = parent.add_subcommand(name, description);
    app->add_option("--config", config_path, "JSON file with parameter values (a run manifest works too)");
  }

  void declare(Param p, std::string flag = {}) {
    if (flag.empty()) flag = "--" + dashed(p.key);
    static const char* names[] = {"UINT", "FLOAT", "TEXT", "PATH", "UINT[,UINT...]", "FLOAT[,FLOAT...]"};
    std::string help = p.help;
    if (!p.fallback.is_null()) help += " [default: " + p.fallback.dump() + "]";
    options[p.key] = app->add_option(flag, raw[p.key], help)->type_name(names[static_cast<int>(p.kind)]);
    params.push_back(std::move(p));
  }

  bool given(const std::string& key) const { return options.at(key)->count() > 0; }

  /// Defaults, overridden by the config file, overridden by flags.
  json resolve() {
    json v = json::object();
    for (const auto& p : params) v[p.key] = p.fallback;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open config " + config_path);
      json file;
      try {
        file = json::parse(in);
      } catch (const json::parse_error& e) {
        throw IoError("config " + config_path + ": " + e.what());
      }
      if (!file.is_object()) throw IoError("config " + config_path + " is not a JSON object");
      if (file.contains("command") && file["command"] != name)
        throw std::invalid_argument("config was written by '" + file["command"].dump() + "', not '" + name + "'");
      for (const auto& [k, val] : file.items()) {
        if (kMetaKeys.count(k)) continue;
        if (!v.contains(k)) throw std::invalid_argument("unknown config key '" + k + "' for " + name);
        v[k] = val;
      }
    }
    for (const auto& p : params)
      if (given(p.key)) v[p.key] = convert(p, raw.at(p.key));
    return v;
  }
};

bool is_count(const json& x) { return x.is_number_unsigned() || (x.is_number_integer() && x.get<std::int64_t>() >= 0); }

std::size_t get_uint(const json& v, const std::string& key) {
  const json& x = v.at(key);
  if (!is_count(x)) throw std::invalid_argument(key + ": expected a non-negative integer");
  return x.get<std::size_t>();
}

double get_real(const json& v, const std::string& key) {
  const json& x = v.at(key);
  if (!x.is_number()) throw std::invalid_argument(key + ": expected a number");
  return x.get<double>();
}

std::string get_text(const json& v, const std::string& key) {
  const json& x = v.at(key);
  if (!x.is_string()) throw std::invalid_argument(key + ": expected a string");
  return x.get<std::string>();
}

std::optional<fs::path> get_path(const json& v, const std::string& key) {
  if (v.at(key).is_null()) return std::nullopt;
  return fs::path(get_text(v, key));
}

fs::path require_path(const json& v, const std::string& key) {
  auto p = get_path(v, key);
  if (!p) throw std::invalid_argument("missing required --" + dashed(key));
  return *p;
}

std::vector<std::size_t> get_uint_list(const json& v, const std::string& key) {
  const json& x = v.at(key);
  if (is_count(x)) return {x.get<std::size_t>()};
  if (!x.is_array() || x.empty()) throw std::invalid_argument(key + ": expected a list of non-negative integers");
  std::vector<std::size_t> out;
  for (const auto& e : x) {
    if (!is_count(e)) throw std::invalid_argument(key + ": expected a list of non-negative integers");
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

std::vector<double> get_real_list(const json& v, const std::string& key) {
  const json& x = v.at(key);
  if (x.is_number()) return {x.get<double>()};
  if (!x.is_array() || x.empty()) throw std::invalid_argument(key + ": expected a list of numbers");
  std::vector<double> out;
  for (const auto& e : x) {
    if (!e.is_number()) throw std::invalid_argument(key + ": expected a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

/// A single value sets every bond; otherwise bonds in (R12, R13, ..., R23, ...) order.
std::optional<FctnRank> get_rank(const json& v, const std::string& key, std::size_t order) {
  if (v.at(key).is_null()) return std::nullopt;
  const auto list = get_uint_list(v, key);
  if (list.size() == 1) return FctnRank(order, list[0]);
  return FctnRank(order, list);
}

json metric_value(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

json metrics_json(const MetricsReport& r) {
  json per = json::array();
  for (double p : r.psnr_per_band) per.push_back(metric_value(p));
  return {{"psnr", metric_value(r.psnr)}, {"ssim", r.ssim}, {"sam", r.sam}, {"psnr_per_band", per},
          {"ssim_per_band", r.ssim_per_band}};
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fs::path sibling(const fs::path& output, const std::string& suffix) {
  fs::path p = output;
  p.replace_extension(suffix);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_manifest(const fs::path& output, const std::string& command, const json& params, const json& extra) {
  json m = params;
  m["command"] = command;
  m["version"] = version();
  for (const auto& [k, val] : extra.items()) m[k] = val;
  m["outputs"]["manifest"] = sibling(output, ".manifest.json").string();
  write_text(sibling(output, ".manifest.json"), m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Parameter sets

void declare_mask_source(Command& c) {
  c.declare({"mask", Kind::Path, nullptr, "Observation mask (.npy, nonzero = observed)"});
  c.declare({"mr", Kind::Real, nullptr, "Missing rate; treats --input as ground truth and removes entries"});
  c.declare({"seed", Kind::Uint, 0, "Mask seed used with --mr"});
}

void declare_global_solver(Command& c) {
  c.declare({"rank", Kind::UintList, nullptr, "FCTN rank: one value or R12,R13,...,R23,... (default: capped)"});
  c.declare({"rank_cap", Kind::Uint, 4, "Default rank min(I_j, I_k, cap)"});
  c.declare({"rho", Kind::Real, 0.01, "Proximal weight"});
  c.declare({"max_iters", Kind::Uint, 100, "Maximum PAM sweeps"});
  c.declare({"tol", Kind::Real, 1e-4, "Relative-change stopping tolerance"});
  c.declare({"init_seed", Kind::Uint, 0, "Seed for factor initialization"});
}

void declare_nonlocal(Command& c) {
  c.declare({"patch", Kind::Uint, 8, "Patch size p"});
  c.declare({"group_size", Kind::Uint, 16, "Patches per group s"});
  c.declare({"interval", Kind::Uint, nullptr, "Key patch interval v (default p-1)"});
  c.declare({"overlap", Kind::Uint, 1, "Patch overlap o"});
  c.declare({"group_rank", Kind::UintList, nullptr, "Group FCTN rank (default: capped)"});
  c.declare({"group_rank_cap", Kind::Uint, 4, "Default group rank cap"});
  c.declare({"group_max_iters", Kind::Uint, 100, "Maximum PAM sweeps per group"});
  c.declare({"group_tol", Kind::Real, 1e-3, "Stopping tolerance per group"});
  c.declare({"workers", Kind::Uint, 1, "Threads for group completion"});
}

InpaintConfig inpaint_config(const json& v, std::size_t order) {
  InpaintConfig cfg;
  cfg.patch = get_uint(v, "patch");
  cfg.group_size = get_uint(v, "group_size");
  if (!v.at("interval").is_null()) cfg.interval = get_uint(v, "interval");
  cfg.overlap = get_uint(v, "overlap");
  cfg.global_rank = get_rank(v, "rank", order);
  cfg.group_rank = get_rank(v, "group_rank", order + 1);
  cfg.global_rank_cap = get_uint(v, "rank_cap");
  cfg.group_rank_cap = get_uint(v, "group_rank_cap");
  const double rho = get_real(v, "rho");
  const std::uint64_t seed = get_uint(v, "init_seed");
  cfg.pam_global = {rho, get_uint(v, "max_iters"), get_real(v, "tol"), seed};
  cfg.pam_group = {rho, get_uint(v, "group_max_iters"), get_real(v, "group_tol"), seed};
  cfg.workers = get_uint(v, "workers");
  cfg.validate();
  return cfg;
}

struct Problem {
  DenseTensor observed;  ///< P_Omega(input)
  ObservationMask mask;
  std::optional<DenseTensor> reference;
};

/// Exactly one of --mask and --mr. With --mr the input is the reference.
Problem load_problem(Command& c, json& v) {
  if (c.given("mask")) v["mr"] = nullptr;
  if (c.given("mr")) v["mask"] = nullptr;
  const bool has_mask = !v.at("mask").is_null();
  const bool has_mr = !v.at("mr").is_null();
  if (has_mask == has_mr) throw std::invalid_argument("specify exactly one of --mask and --mr");

  const DenseTensor input = load_tensor(require_path(v, "input"));
  Problem p;
  if (has_mr) {
    p.mask = make_mask(input.shape(), get_real(v, "mr"), get_uint(v, "seed"));
    p.reference = input;
  } else {
    p.mask = load_mask(*get_path(v, "mask"));
    if (p.mask.shape() != input.shape()) throw std::invalid_argument("mask shape does not match the input");
  }
  if (auto ref = get_path(v, "reference")) p.reference = load_tensor(*ref);
  p.observed = project_observed(input, p.mask);
  return p;
}

json trace_json(const PamTrace& t) {
  return {{"iterations", t.iterations},
          {"converged", t.converged},
          {"final_objective", t.objective.empty() ? 0.0 : t.objective.back()}};
}

// ---------------------------------------------------------------------------
// Subcommands

int run_complete(Command& c, std::ostream& out) {
  json v = c.resolve();
  const fs::path output = require_path(v, "output");
  const auto t0 = Clock::now();
  const Problem p = load_problem(c, v);
  const std::size_t order = p.observed.order();
  const FctnRank rank = get_rank(v, "rank", order).value_or(FctnRank::capped(p.observed.shape(), get_uint(v, "rank_cap")));
  const PamConfig pam{get_real(v, "rho"), get_uint(v, "max_iters"), get_real(v, "tol"), get_uint(v, "init_seed")};
  pam.validate();
  const CompletionResult r = pam_complete(p.observed, p.mask, rank, pam);
  save_tensor(output, r.x);

  json extra;
  extra["outputs"]["output"] = output.string();
  if (!v.at("mr").is_null()) {
    save_mask(sibling(output, ".mask.npy"), p.mask);
    extra["outputs"]["mask"] = sibling(output, ".mask.npy").string();
  }
  extra["report"] = trace_json(r.trace);
  extra["report"]["rank"] = rank.upper();
  if (p.reference) {
    extra["metrics"] = metrics_json(evaluate(r.x, *p.reference));
    out << "psnr " << extra["metrics"]["psnr"].dump() << "  ssim " << extra["metrics"]["ssim"].dump() << "  sam "
        << extra["metrics"]["sam"].dump() << "\n";
  }
  extra["timings"] = {{"total_seconds", seconds_since(t0)}, {"solve_seconds", r.trace.seconds}};
  write_manifest(output, c.name, v, extra);
  out << "wrote " << output.string() << " (" << r.trace.iterations << " sweeps)\n";
  return 0;
}

int run_inpaint(Command& c, std::ostream& out) {
  json v = c.resolve();
  const fs::path output = require_path(v, "output");
  const auto t0 = Clock::now();
  const Problem p = load_problem(c, v);
  const InpaintConfig cfg = inpaint_config(v, p.observed.order());
  const InpaintResult r = nl_fctn_inpaint(p.observed, p.mask, cfg);
  save_tensor(output, r.x);

  json extra;
  extra["outputs"]["output"] = output.string();
  if (!v.at("mr").is_null()) {
    save_mask(sibling(output, ".mask.npy"), p.mask);
    extra["outputs"]["mask"] = sibling(output, ".mask.npy").string();
  }
  if (auto initial = get_path(v, "initial_output")) {
    save_tensor(*initial, r.initial);
    extra["outputs"]["initial_output"] = initial->string();
  }
  const InpaintReport& rep = r.report;
  extra["report"] = {{"stage_a", trace_json(rep.stage_a)},
                     {"patch_count", rep.patch_count},
                     {"group_count", rep.group_count},
                     {"skipped_groups", rep.skipped_groups},
                     {"group_shape", rep.group_shape}};
  if (p.reference) {
    extra["metrics"] = metrics_json(evaluate(r.x, *p.reference));
    extra["metrics"]["stage_a"] = metrics_json(evaluate(r.initial, *p.reference));
    out << "psnr " << extra["metrics"]["psnr"].dump() << " (stage A " << extra["metrics"]["stage_a"]["psnr"].dump()
        << ")  ssim " << extra["metrics"]["ssim"].dump() << "  sam " << extra["metrics"]["sam"].dump() << "\n";
  }
  extra["timings"] = {{"total_seconds", seconds_since(t0)},
                      {"stage_a_seconds", rep.stage_a_seconds},
                      {"stage_b_seconds", rep.stage_b_seconds}};
  write_manifest(output, c.name, v, extra);
  out << "wrote " << output.string() << " (" << rep.group_count << " groups)\n";
  return 0;
}

int run_metrics(Command& c, std::ostream& out) {
  json v = c.resolve();
  const DenseTensor x = load_tensor(require_path(v, "input"));
  const DenseTensor ref = load_tensor(require_path(v, "reference"));
  const MetricsReport r = evaluate(x, ref);
  const std::string format = get_text(v, "format");
  std::string text;
  if (format == "json") {
    text = metrics_json(r).dump(2) + "\n";
  } else if (format == "csv") {
    std::ostringstream s;
    s << std::setprecision(17) << "psnr,ssim,sam\n";
    s << r.psnr << ',' << r.ssim << ',' << r.sam << '\n';  // streams print infinity as "inf"
    text = s.str();
  } else {
    throw std::invalid_argument("format must be json or csv");
  }
  out << text;
  if (auto output = get_path(v, "output")) {
    write_text(*output, text);
    write_manifest(*output, c.name, v, {{"outputs", {{"output", output->string()}}}, {"metrics", metrics_json(r)}});
  }
  return 0;
}

int run_mask(Command& c, std::ostream& out) {
  json v = c.resolve();
  const fs::path output = require_path(v, "output");
  Shape shape;
  if (auto like = get_path(v, "like")) {
    if (!v.at("shape").is_null()) throw std::invalid_argument("give either --shape or --like, not both");
    shape = load_tensor(*like).shape();
  } else if (!v.at("shape").is_null()) {
    shape = get_uint_list(v, "shape");
  } else {
    throw std::invalid_argument("missing --shape or --like");
  }
  if (v.at("mr").is_null()) throw std::invalid_argument("missing required --mr");
  const ObservationMask mask = make_mask(shape, get_real(v, "mr"), get_uint(v, "seed"));
  save_mask(output, mask);
  write_manifest(output, c.name, v,
                 {{"outputs", {{"output", output.string()}}},
                  {"report", {{"observed", mask.count_observed()}, {"missing", mask.size() - mask.count_observed()}}}});
  out << "wrote " << output.string() << " (" << mask.size() - mask.count_observed() << " of " << mask.size()
      << " missing)\n";
  return 0;
}

int run_export(Command& c, std::ostream& out) {
  json v = c.resolve();
  const fs::path output = require_path(v, "output");
  const DenseTensor x = load_tensor(require_path(v, "input"));
  export_png(output, x, get_uint_list(v, "bands"), get_uint(v, "outer"));
  write_manifest(output, c.name, v, {{"outputs", {{"output", output.string()}}}});
  out << "wrote " << output.string() << "\n";
  return 0;
}

std::string fixed(double x, int digits) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

int run_bench(Command& c, std::ostream& out) {
  json v = c.resolve();
  const auto t0 = Clock::now();
  const DenseTensor truth = load_tensor(require_path(v, "input"));
  const auto mrs = get_real_list(v, "mrs");
  const auto seeds = get_uint_list(v, "seeds");
  const std::string method = get_text(v, "method");
  if (method != "inpaint" && method != "complete") throw std::invalid_argument("method must be inpaint or complete");
  const InpaintConfig cfg = inpaint_config(v, truth.order());

  std::string format = v.at("format").is_null() ? "" : get_text(v, "format");
  const auto output = get_path(v, "output");
  if (format.empty()) format = output && output->extension() == ".csv" ? "csv" : "md";
  if (format != "md" && format != "csv") throw std::invalid_argument("format must be md or csv");

  json rows = json::array();
  std::ostringstream table;
  if (format == "md") {
    table << "| MR | PSNR | SSIM | SAM |\n|---:|---:|---:|---:|\n";
  } else {
    table << "mr,psnr,ssim,sam\n";
  }
  for (double mr : mrs) {
    double psnr_sum = 0.0, ssim_sum = 0.0, sam_sum = 0.0;
    json runs = json::array();
    for (std::size_t seed : seeds) {
      const ObservationMask mask = make_mask(truth.shape(), mr, seed);
      const DenseTensor observed = project_observed(truth, mask);
      DenseTensor x = method == "inpaint"
                          ? nl_fctn_inpaint(observed, mask, cfg).x
                          : pam_complete(observed, mask, cfg.global_rank_for(truth.shape()), cfg.pam_global).x;
      const MetricsReport m = evaluate(x, truth);
      psnr_sum += m.psnr;
      ssim_sum += m.ssim;
      sam_sum += m.sam;
      runs.push_back({{"seed", seed}, {"psnr", metric_value(m.psnr)}, {"ssim", m.ssim}, {"sam", m.sam}});
    }
    const double n = static_cast<double>(seeds.size());
    const double psnr_mean = psnr_sum / n, ssim_mean = ssim_sum / n, sam_mean = sam_sum / n;
    rows.push_back({{"mr", mr}, {"psnr", metric_value(psnr_mean)}, {"ssim", ssim_mean}, {"sam", sam_mean}, {"runs", runs}});
    if (format == "md") {
      table << "| " << fixed(mr * 100.0, 0) << "% | " << fixed(psnr_mean, 4) << " | " << fixed(ssim_mean, 4) << " | "
            << fixed(sam_mean, 4) << " |\n";
    } else {
      table << std::setprecision(17) << mr << ',' << fixed(psnr_mean, 6) << ',' << fixed(ssim_mean, 6) << ','
            << fixed(sam_mean, 6) << '\n';
    }
  }
  out << table.str();
  if (output) {
    write_text(*output, table.str());
    write_manifest(*output, c.name, v,
                   {{"outputs", {{"output", output->string()}}},
                    {"table", rows},
                    {"timings", {{"total_seconds", seconds_since(t0)}}}});
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlocal FCTN tensor completion for image inpainting", "nlfctn"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  Command complete(app, "complete", "Global FCTN completion (no nonlocal stage)");
  complete.declare({"input", Kind::Path, nullptr, "Input tensor (.npy)"});
  declare_mask_source(complete);
  complete.declare({"reference", Kind::Path, nullptr, "Ground truth for metrics (defaults to --input with --mr)"});
  complete.declare({"output", Kind::Path, nullptr, "Output tensor (.npy)"});
  declare_global_solver(complete);

  Command inpaint(app, "inpaint", "Two-stage nonlocal FCTN inpainting");
  inpaint.declare({"input", Kind::Path, nullptr, "Input tensor (.npy)"});
  declare_mask_source(inpaint);
  inpaint.declare({"reference", Kind::Path, nullptr, "Ground truth for metrics (defaults to --input with --mr)"});
  inpaint.declare({"output", Kind::Path, nullptr, "Output tensor (.npy)"});
  inpaint.declare({"initial_output", Kind::Path, nullptr, "Also save the global-stage result here"});
  declare_global_solver(inpaint);
  declare_nonlocal(inpaint);

  Command metrics(app, "metrics", "PSNR, SSIM and SAM between two tensors");
  metrics.declare({"input", Kind::Path, nullptr, "Estimate (.npy)"}, "input");
  metrics.declare({"reference", Kind::Path, nullptr, "Reference (.npy)"}, "reference");
  metrics.declare({"format", Kind::Text, "json", "json or csv"});
  metrics.declare({"output", Kind::Path, nullptr, "Also write the report here"});

  Command mask(app, "mask", "Write a random observation mask");
  mask.declare({"shape", Kind::UintList, nullptr, "Mask shape, e.g. 64,64,8"});
  mask.declare({"like", Kind::Path, nullptr, "Take the shape from this tensor"});
  mask.declare({"mr", Kind::Real, nullptr, "Missing rate in [0, 1)"});
  mask.declare({"seed", Kind::Uint, 0, "Random seed"});
  mask.declare({"output", Kind::Path, nullptr, "Output mask (.npy)"});

  Command slice(app, "export-slice", "Write one band (or a 3-band composite) as PNG");
  slice.declare({"input", Kind::Path, nullptr, "Input tensor (.npy)"});
  slice.declare({"bands", Kind::UintList, json::array({0}), "One band index, or three for RGB"});
  slice.declare({"outer", Kind::Uint, 0, "Index over the modes after the band mode"});
  slice.declare({"output", Kind::Path, nullptr, "Output image (.png)"});

  Command bench(app, "bench", "Sweep missing rates and seeds, tabulate mean metrics");
  bench.declare({"input", Kind::Path, nullptr, "Ground-truth tensor (.npy)"});
  bench.declare({"mrs", Kind::RealList, json::array({0.8, 0.9}), "Missing rates"});
  bench.declare({"seeds", Kind::UintList, json::array({1}), "Mask seeds"});
  bench.declare({"method", Kind::Text, "inpaint", "inpaint or complete"});
  bench.declare({"format", Kind::Text, nullptr, "md or csv (default from --output extension)"});
  bench.declare({"output", Kind::Path, nullptr, "Also write the table here"});
  declare_global_solver(bench);
  declare_nonlocal(bench);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*complete.app) return run_complete(complete, out);
    if (*inpaint.app) return run_inpaint(inpaint, out);
    if (*metrics.app) return run_metrics(metrics, out);
    if (*mask.app) return run_mask(mask, out);
    if (*slice.app) return run_export(slice, out);
    if (*bench.app) return run_bench(bench, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace nlfctn::cli
