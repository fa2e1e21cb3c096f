#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "frit/frit.h"

namespace frit_cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// A failure that ends the command with `code`.
struct Failure {
  int code;
  std::string message;
};

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Tf = std::unique_ptr<frit_tf, Deleter<frit_tf, frit_tf_free>>;
using Record = std::unique_ptr<frit_record, Deleter<frit_record, frit_record_free>>;
using Case = std::unique_ptr<frit_case, Deleter<frit_case, frit_case_free>>;
using Tuning = std::unique_ptr<frit_tuning, Deleter<frit_tuning, frit_tuning_free>>;
using Validation = std::unique_ptr<frit_validation, Deleter<frit_validation, frit_validation_free>>;

int exit_code_for(frit_status s) {
  switch (s) {
    case FRIT_OK:
      return kExitOk;
    case FRIT_E_INVALID_ARGUMENT:
    case FRIT_E_IMPROPER:
    case FRIT_E_UNKNOWN_NAME:
      return kExitUsage;
    case FRIT_E_ASSUMPTION:
      return kExitAssumption;
    case FRIT_E_SAMPLE_TIME_MISMATCH:
    case FRIT_E_DATA_MALFORMED:
    case FRIT_E_IO:
      return kExitData;
    default:
      return kExitNumerical;
  }
}

void check(frit_status s, const std::string& context) {
  if (s == FRIT_OK) return;
  std::string message = context + ": " + frit_last_error();
  if (s == FRIT_E_SAMPLE_TIME_MISMATCH) message = "sample time mismatch: " + message;
  throw Failure{exit_code_for(s), message};
}

[[noreturn]] void usage_error(const std::string& message) { throw Failure{kExitUsage, message}; }
[[noreturn]] void data_error(const std::string& message) { throw Failure{kExitData, message}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> to_vector(const double* p, std::size_t n) { return std::vector<double>(p, p + n); }

// For getters that report their length through an out parameter.
template <typename Getter>
std::vector<double> fetch(Getter getter) {
  std::size_t n = 0;
  const double* p = getter(&n);
  return to_vector(p, n);
}

// ---- files ----

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitData, "cannot create " + dir.string() + ": " + ec.message()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{kExitData, "cannot write " + path.string()};
  f << text;
}

template <typename J>
void write_json(const fs::path& path, const J& doc) {
  write_text(path, doc.dump(2) + "\n");
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) usage_error("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    data_error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

struct Column {
  std::string name;
  const double* data;
};

// Header row then one row per sample, 17 significant digits.
void write_csv(const fs::path& path, const std::vector<Column>& columns, std::size_t rows,
               bool with_index = true) {
  std::string text;
  if (with_index) text += "k";
  for (std::size_t c = 0; c < columns.size(); ++c) text += (c || with_index ? "," : "") + columns[c].name;
  text += "\n";
  for (std::size_t k = 0; k < rows; ++k) {
    if (with_index) text += std::to_string(k);
    for (std::size_t c = 0; c < columns.size(); ++c) text += (c || with_index ? "," : "") + fmt(columns[c].data[k]);
    text += "\n";
  }
  write_text(path, text);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  const auto last = s.find_last_not_of(" \t\r");
  return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

std::optional<double> parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) return std::nullopt;
  return v;
}

struct DataFile {
  std::vector<double> r0, u0, y0;
  std::optional<double> sample_time;  // from an optional t column
};

DataFile read_data_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) data_error("cannot open data file " + path.string());
  std::string line;
  if (!std::getline(f, line)) data_error("data file is empty: " + path.string());
  const std::vector<std::string> header = split(trim(line), ',');
  int col_k = -1, col_t = -1, col_r = -1, col_u = -1, col_y = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = trim(header[i]);
    int* slot = h == "k" ? &col_k : h == "t" ? &col_t : h == "r0" ? &col_r : h == "u0" ? &col_u : h == "y0" ? &col_y : nullptr;
    if (!slot) data_error("data header: unexpected column '" + h + "'");
    if (*slot >= 0) data_error("data header: duplicate column '" + h + "'");
    *slot = static_cast<int>(i);
  }
  if (col_k < 0 || col_r < 0 || col_u < 0 || col_y < 0) data_error("data header must contain k, r0, u0, y0");

  DataFile d;
  std::vector<double> t;
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(trim(line), ',');
    if (fields.size() != header.size())
      data_error("data row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields, expected " +
                 std::to_string(header.size()));
    auto value = [&](int col) {
      const auto v = parse_double(fields[col]);
      if (!v) data_error("data row " + std::to_string(row) + ": '" + trim(fields[col]) + "' is not a number");
      return *v;
    };
    if (value(col_k) != static_cast<double>(d.r0.size()))
      data_error("data row " + std::to_string(row) + ": k must count up from 0");
    d.r0.push_back(value(col_r));
    d.u0.push_back(value(col_u));
    d.y0.push_back(value(col_y));
    if (col_t >= 0) t.push_back(value(col_t));
  }
  if (d.r0.size() < 2) data_error("data file needs at least two samples");
  if (col_t >= 0) {
    const double ts = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t k = 1; k < t.size(); ++k)
      if (std::abs(t[k] - t[k - 1] - ts) > 1e-6 * ts) data_error("data t column is not uniformly spaced");
    d.sample_time = ts;
  }
  return d;
}

// ---- configuration ----

const std::vector<std::string> kFopidNames{"kfp", "kfi", "lambda", "kfd", "mu"};
const std::vector<std::string> kIopidNames{"kp", "ki", "kd"};

const std::vector<std::string>& parameter_names(frit_controller_kind kind) {
  return kind == FRIT_FOPID ? kFopidNames : kIopidNames;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    usage_error(std::string("config: field '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) usage_error("config: missing '" + where + key + "'");
  return get_or<T>(j, key, T{});
}

frit_controller_spec parse_controller(const json& j) {
  const json c = require<json>(j, "controller", "");
  const std::string kind = require<std::string>(c, "kind", "controller.");
  frit_controller_kind k;
  if (kind == "fopid") k = FRIT_FOPID;
  else if (kind == "iopid") k = FRIT_IOPID;
  else usage_error("config: controller.kind must be 'fopid' or 'iopid'");
  frit_controller_spec spec;
  frit_controller_spec_default(&spec, k, require<double>(c, "sample_time", "controller."));
  if (c.contains("oustaloup")) {
    const json& o = c.at("oustaloup");
    spec.oustaloup_order = get_or<int>(o, "order", spec.oustaloup_order);
    spec.w_b = get_or<double>(o, "w_b", spec.w_b);
    spec.w_h = get_or<double>(o, "w_h", spec.w_h);
  }
  if (!(spec.sample_time > 0.0)) usage_error("config: controller.sample_time must be positive");
  return spec;
}

// Continuous specs are Tustin-discretized at the controller sample time.
Tf parse_model(const json& j, const char* key, double sample_time) {
  const json m = require<json>(j, key, "");
  const std::string where = std::string(key) + ".";
  const std::string domain = require<std::string>(m, "domain", where);
  const auto num = require<std::vector<double>>(m, "num", where);
  const auto den = require<std::vector<double>>(m, "den", where);
  if (num.empty() || den.empty()) usage_error("config: " + where + "num/den must be non-empty");
  frit_tf* raw = nullptr;
  if (domain == "continuous") {
    const std::string method = get_or<std::string>(m, "discretization", "tustin");
    if (method != "tustin") usage_error("config: " + where + "discretization must be 'tustin'");
    check(frit_tf_continuous(num.data(), num.size(), den.data(), den.size(), get_or<double>(m, "dead_time", 0.0),
                             &raw),
          key);
    Tf continuous(raw);
    check(frit_tf_tustin(continuous.get(), sample_time, &raw), key);
    return Tf(raw);
  }
  if (domain != "discrete") usage_error("config: " + where + "domain must be 'continuous' or 'discrete'");
  const double ts = get_or<double>(m, "sample_time", sample_time);
  const int delay = get_or<int>(m, "delay", 0);
  if (delay < 0) usage_error("config: " + where + "delay must be non-negative");
  check(frit_tf_discrete(num.data(), num.size(), den.data(), den.size(), ts, static_cast<std::size_t>(delay), &raw),
        key);
  Tf tf(raw);
  if (std::abs(ts - sample_time) > 1e-9 * sample_time)
    throw Failure{kExitData, "sample time mismatch: " + where + "sample_time " + fmt(ts) +
                                 " differs from controller.sample_time " + fmt(sample_time)};
  return tf;
}

json model_json(const frit_tf* tf) {
  std::size_t nn = 0, nd = 0;
  const double* num = frit_tf_num(tf, &nn);
  const double* den = frit_tf_den(tf, &nd);
  json m;
  m["domain"] = "discrete";
  m["num"] = to_vector(num, nn);
  m["den"] = to_vector(den, nd);
  m["sample_time"] = frit_tf_sample_time(tf);
  m["delay"] = static_cast<int>(frit_tf_delay(tf));
  return m;
}

struct Overrides {
  std::string seeds;
  std::optional<std::size_t> swarm_size;
  std::optional<std::size_t> iterations;
  std::optional<unsigned> workers;
  std::string out_dir = "out";
};

frit_pso_config parse_pso(const json& j, const Overrides& o) {
  frit_pso_config cfg;
  frit_pso_config_default(&cfg);
  if (j.is_object() && j.contains("pso")) {
    const json& p = j.at("pso");
    cfg.swarm_size = get_or<std::size_t>(p, "swarm_size", cfg.swarm_size);
    cfg.max_iterations = get_or<std::size_t>(p, "max_iterations", cfg.max_iterations);
    cfg.inertia_min = get_or<double>(p, "inertia_min", cfg.inertia_min);
    cfg.inertia_max = get_or<double>(p, "inertia_max", cfg.inertia_max);
    cfg.cognitive_coeff = get_or<double>(p, "cognitive_coeff", cfg.cognitive_coeff);
    cfg.social_coeff = get_or<double>(p, "social_coeff", cfg.social_coeff);
    cfg.stall_iterations = get_or<std::size_t>(p, "stall_iterations", cfg.stall_iterations);
    cfg.tolerance = get_or<double>(p, "tolerance", cfg.tolerance);
  }
  if (o.swarm_size) cfg.swarm_size = *o.swarm_size;
  if (o.iterations) cfg.max_iterations = *o.iterations;
  cfg.workers = o.workers ? *o.workers : std::max(1u, std::thread::hardware_concurrency());
  return cfg;
}

json pso_json(const frit_pso_config& c) {
  return {{"swarm_size", c.swarm_size},
          {"max_iterations", c.max_iterations},
          {"inertia_min", c.inertia_min},
          {"inertia_max", c.inertia_max},
          {"cognitive_coeff", c.cognitive_coeff},
          {"social_coeff", c.social_coeff},
          {"stall_iterations", c.stall_iterations},
          {"tolerance", c.tolerance}};
}

// --seeds, else the config's list, else FRIT_SEED, else 1.
std::vector<std::uint64_t> resolve_seeds(const Overrides& o, const json& config) {
  std::vector<unsigned long long> seeds;
  if (!o.seeds.empty()) {
    seeds = parse_seed_list(o.seeds);
  } else if (config.is_object() && config.contains("seeds")) {
    seeds = get_or<std::vector<unsigned long long>>(config, "seeds", {});
  } else if (const char* env = std::getenv("FRIT_SEED"); env && *env) {
    seeds = parse_seed_list(env);
  } else {
    seeds = {1};
  }
  if (seeds.empty()) usage_error("seed list is empty");
  return {seeds.begin(), seeds.end()};
}

json controller_json(const frit_controller_spec& s) {
  json c;
  c["kind"] = s.kind == FRIT_FOPID ? "fopid" : "iopid";
  c["sample_time"] = s.sample_time;
  if (s.kind == FRIT_FOPID) c["oustaloup"] = {{"order", s.oustaloup_order}, {"w_b", s.w_b}, {"w_h", s.w_h}};
  return c;
}

// ---- report pieces ----

json loss_json(const frit_loss& l) {
  return {{"j", l.j},
          {"epsilon_l1", l.epsilon_l1},
          {"t_l1", l.t_l1},
          {"penalized", l.penalized != 0},
          {"penalty_reason", frit_penalty_reason_string(l.penalty_reason)}};
}

json bound_json(const frit_bound& b) {
  if (!b.valid) return nullptr;
  return {{"gamma_r0", b.gamma_r0},           {"bound", b.bound},
          {"t_l1", b.t_l1},                   {"satisfied", b.satisfied != 0},
          {"inverse_l1", b.inverse_l1},       {"induced_bound", b.induced_bound},
          {"induced_satisfied", b.induced_satisfied != 0}};
}

json stats_json(const frit_tuning_stats& s) {
  return {{"seed", s.seed},
          {"iterations", s.iterations},
          {"evaluations", s.evaluations},
          {"nonpenalized_evaluations", s.nonpenalized_evaluations},
          {"penalized_evaluations", s.penalized_evaluations},
          {"bound_violations", s.bound_violations},
          {"induced_bound_violations", s.induced_bound_violations},
          {"worst_bound_ratio", s.worst_bound_ratio}};
}

json runs_json(const frit_tuning* t) {
  json runs = json::array();
  for (std::size_t i = 0; i < frit_tuning_run_count(t); ++i) {
    frit_tuning_stats s;
    double j = 0.0;
    check(frit_tuning_run(t, i, &s, &j), "tuning run");
    json r = stats_json(s);
    r["j_star"] = j;
    runs.push_back(r);
  }
  return runs;
}

json named(const std::vector<double>& theta, frit_controller_kind kind) {
  json m = json::object();
  const auto& names = parameter_names(kind);
  for (std::size_t i = 0; i < theta.size() && i < names.size(); ++i) m[names[i]] = theta[i];
  return m;
}

json validation_json(const frit_validation* v, bool with_poles) {
  frit_validation_summary s;
  frit_validation_summary_get(v, &s);
  json j = {{"stable", s.stable != 0},
            {"max_pole_magnitude", s.max_pole_magnitude},
            {"tracking_error_l1", s.tracking_error_l1},
            {"max_abs_input", s.max_abs_input},
            {"input_l1", s.input_l1},
            {"samples", s.length}};
  if (with_poles) {
    std::vector<double> re(s.pole_count), im(s.pole_count);
    frit_validation_poles(v, re.data(), im.data());
    json poles = json::array();
    for (std::size_t i = 0; i < s.pole_count; ++i) poles.push_back({re[i], im[i]});
    j["poles"] = poles;
  }
  return j;
}

void write_step_csv(const fs::path& path, const frit_validation* v) {
  frit_validation_summary s;
  frit_validation_summary_get(v, &s);
  write_csv(path,
            {{"r", frit_validation_trace(v, FRIT_TRACE_R)},
             {"y_model", frit_validation_trace(v, FRIT_TRACE_Y_MODEL)},
             {"y_tuned", frit_validation_trace(v, FRIT_TRACE_Y_CLOSED_LOOP)},
             {"u", frit_validation_trace(v, FRIT_TRACE_U)}},
            s.length);
}

void write_trace_csv(const fs::path& path, const frit_tuning* t) {
  std::size_t n = 0;
  const double* trace = frit_tuning_trace(t, &n);
  std::string text = "iteration,best_value\n";
  for (std::size_t i = 0; i < n; ++i) text += std::to_string(i) + "," + fmt(trace[i]) + "\n";
  write_text(path, text);
}

Tuning run_tuning(const frit_record* data, const frit_tf* md, const frit_controller_spec& spec,
                  const std::vector<double>& theta0, const std::vector<double>& lower, const std::vector<double>& upper,
                  const frit_pso_config& pso, const std::vector<std::uint64_t>& seeds) {
  const std::size_t dim = frit_controller_dimension(spec.kind);
  if (theta0.size() != dim || lower.size() != dim || upper.size() != dim)
    usage_error("config: theta0 and bounds need " + std::to_string(dim) + " entries for " +
                (spec.kind == FRIT_FOPID ? "fopid" : "iopid"));
  frit_tuning* raw = nullptr;
  check(frit_tune(data, md, &spec, theta0.data(), lower.data(), upper.data(), dim, &pso, seeds.data(), seeds.size(),
                  &raw),
        "tune");
  return Tuning(raw);
}

// ---- acceptance thresholds reported in summary.json ----

struct Thresholds {
  double j0_relative = 0.01;
  double j_star_max;
  double j_star_min;
};

Thresholds thresholds_for(const std::string& name) {
  if (name == "example1") return {0.01, 0.6, 0.0};
  if (name == "example2") return {0.01, 60.0, 10.0};
  if (name == "example3_fo") return {0.01, 1.2, 0.0};
  return {0.01, 1.5, 0.0};
}

constexpr double kPoleMargin = 1e-6;

// ---- commands ----

void write_comparison(const fs::path& out_dir, std::ostream& out) {
  const fs::path fo_path = out_dir / "example3_fo" / "summary.json";
  const fs::path io_path = out_dir / "example3_io" / "summary.json";
  if (!fs::exists(fo_path) || !fs::exists(io_path)) return;

  double published_fo = 0.0, published_io = 0.0;
  auto validated = [](const char* name, const json& summary, double& published) {
    frit_case* raw = nullptr;
    check(frit_case_open(name, &raw), name);
    Case bench(raw);
    published = frit_case_published_j_star(bench.get());
    const auto theta = summary.at("theta_star").get<std::vector<double>>();
    frit_validation* v = nullptr;
    check(frit_case_validate(bench.get(), theta.data(), theta.size(), &v), name);
    return Validation(v);
  };
  const json fo_summary = read_json(fo_path);
  const json io_summary = read_json(io_path);
  const Validation fo = validated("example3_fo", fo_summary, published_fo);
  const Validation io = validated("example3_io", io_summary, published_io);
  const double j_fo = fo_summary.at("j_star").get<double>();
  const double j_io = io_summary.at("j_star").get<double>();

  frit_comparison c;
  check(frit_compare(fo.get(), j_fo, io.get(), j_io, &c), "compare");
  ordered_json doc;
  doc["j_star"] = {{"fopid", c.j_fo}, {"iopid", c.j_io}};
  doc["tracking_error_l1"] = {{"fopid", c.tracking_error_l1_fo}, {"iopid", c.tracking_error_l1_io}};
  doc["max_abs_input"] = {{"fopid", c.max_abs_input_fo}, {"iopid", c.max_abs_input_io}};
  doc["input_l1"] = {{"fopid", c.input_l1_fo}, {"iopid", c.input_l1_io}};
  doc["ranking_by_j"] = c.fo_lower_loss ? json{"fopid", "iopid"} : json{"iopid", "fopid"};
  doc["fopid_lower_loss"] = c.fo_lower_loss != 0;
  doc["fopid_lower_tracking_error"] = c.fo_lower_tracking_error != 0;
  doc["fopid_lower_peak_input"] = c.fo_lower_peak_input != 0;
  doc["published_j_star"] = {{"fopid", published_fo}, {"iopid", published_io}};
  write_json(out_dir / "comparison_example3.json", doc);

  frit_validation_summary s;
  frit_validation_summary_get(fo.get(), &s);
  const double* y_model = frit_validation_trace(fo.get(), FRIT_TRACE_Y_MODEL);
  const double* y_fo = frit_validation_trace(fo.get(), FRIT_TRACE_Y_CLOSED_LOOP);
  const double* y_io = frit_validation_trace(io.get(), FRIT_TRACE_Y_CLOSED_LOOP);
  std::vector<double> e_fo(s.length), e_io(s.length);
  for (std::size_t k = 0; k < s.length; ++k) {
    e_fo[k] = std::abs(y_fo[k] - y_model[k]);
    e_io[k] = std::abs(y_io[k] - y_model[k]);
  }
  write_csv(out_dir / "comparison_example3.csv",
            {{"r", frit_validation_trace(fo.get(), FRIT_TRACE_R)},
             {"y_model", y_model},
             {"y_fopid", y_fo},
             {"y_iopid", y_io},
             {"u_fopid", frit_validation_trace(fo.get(), FRIT_TRACE_U)},
             {"u_iopid", frit_validation_trace(io.get(), FRIT_TRACE_U)},
             {"abs_error_fopid", e_fo.data()},
             {"abs_error_iopid", e_io.data()}},
            s.length);
  out << "comparison: J fopid " << fmt(c.j_fo) << " vs iopid " << fmt(c.j_io) << " -> "
      << (c.fo_lower_loss ? "fopid" : "iopid") << " ranks first; wrote "
      << (out_dir / "comparison_example3.json").string() << "\n";
}

int cmd_reproduce(const std::string& name, const Overrides& o, std::ostream& out) {
  frit_case* raw_case = nullptr;
  const frit_status open = frit_case_open(name.c_str(), &raw_case);
  if (open == FRIT_E_UNKNOWN_NAME) usage_error(frit_last_error());
  check(open, "reproduce");
  const Case bench(raw_case);

  frit_controller_spec spec;
  frit_case_controller(bench.get(), &spec);
  const frit_case* c = bench.get();
  const auto theta0 = fetch([c](std::size_t* n) { return frit_case_theta0(c, n); });
  const auto lower = fetch([c](std::size_t* n) { return frit_case_lower(c, n); });
  const auto upper = fetch([c](std::size_t* n) { return frit_case_upper(c, n); });
  const std::vector<std::uint64_t> seeds = resolve_seeds(o, json());
  const frit_pso_config pso = parse_pso(json(), o);

  frit_record* raw_record = nullptr;
  check(frit_case_collect(bench.get(), &raw_record), "collect data");
  const Record data(raw_record);
  frit_tf* raw_md = nullptr;
  check(frit_case_reference_model(bench.get(), &raw_md), "reference model");
  const Tf md(raw_md);

  out << name << ": tuning " << (spec.kind == FRIT_FOPID ? "fopid" : "iopid") << " over " << seeds.size()
      << " seed(s)\n";
  const Tuning tuning = run_tuning(data.get(), md.get(), spec, theta0, lower, upper, pso, seeds);
  const frit_tuning* t = tuning.get();
  const auto theta_star = fetch([t](std::size_t* n) { return frit_tuning_theta_star(t, n); });
  frit_validation* raw_v = nullptr;
  check(frit_case_validate(bench.get(), theta_star.data(), theta_star.size(), &raw_v), "validate");
  const Validation validation(raw_v);

  frit_loss loss;
  frit_bound bound;
  frit_tuning_stats stats;
  frit_validation_summary vs;
  frit_tuning_loss(tuning.get(), &loss);
  frit_tuning_bound(tuning.get(), &bound);
  frit_tuning_stats_get(tuning.get(), &stats);
  frit_validation_summary_get(validation.get(), &vs);

  const double j0 = frit_tuning_j0(tuning.get());
  const double j_star = frit_tuning_j_star(tuning.get());
  const double pub_j0 = frit_case_published_j0(bench.get());
  const double pub_j_star = frit_case_published_j_star(bench.get());
  const auto pub_theta = fetch([c](std::size_t* n) { return frit_case_published_theta_star(c, n); });
  const Thresholds th = thresholds_for(name);

  std::size_t violations = 0;
  for (std::size_t i = 0; i < frit_tuning_run_count(tuning.get()); ++i) {
    frit_tuning_stats s;
    check(frit_tuning_run(tuning.get(), i, &s, nullptr), "tuning run");
    violations += s.bound_violations;
  }

  const bool j0_ok = std::abs(j0 - pub_j0) <= th.j0_relative * pub_j0;
  const bool j_star_ok = j_star <= th.j_star_max && j_star >= th.j_star_min;

  ordered_json summary;
  summary["example"] = name;
  summary["controller"] = controller_json(spec);
  summary["parameter_names"] = parameter_names(spec.kind);
  summary["seeds"] = seeds;
  summary["best_seed"] = stats.seed;
  summary["theta0"] = theta0;
  summary["theta_star"] = theta_star;
  summary["theta_star_named"] = named(theta_star, spec.kind);
  summary["j0"] = j0;
  summary["j_star"] = j_star;
  summary["loss"] = loss_json(loss);
  summary["stability_bound"] = bound_json(bound);
  summary["search"] = stats_json(stats);
  summary["runs"] = runs_json(tuning.get());
  summary["validation"] = validation_json(validation.get(), false);
  summary["published"] = {{"j0", pub_j0}, {"j_star", pub_j_star}, {"theta_star", pub_theta}};
  ordered_json checks;
  checks["j0_within_1pct"] = j0_ok;
  checks["j_star_threshold"] = {{"min", th.j_star_min}, {"max", th.j_star_max}};
  checks["j_star_within_threshold"] = j_star_ok;
  checks["improved_over_theta0"] = j_star <= j0;
  checks["closed_loop_stable"] = vs.stable != 0;
  checks["pole_margin_1e-6"] = vs.max_pole_magnitude < 1.0 - kPoleMargin;
  checks["bound_violations_all_runs"] = violations;
  summary["checks"] = checks;
  summary["status"] = j0_ok && j_star_ok ? "PASS" : "FAIL";

  const fs::path dir = fs::path(o.out_dir) / name;
  ensure_dir(dir);
  write_json(dir / "summary.json", summary);
  write_trace_csv(dir / "trace.csv", tuning.get());
  write_step_csv(dir / "step_response.csv", validation.get());
  const std::size_t rows = frit_record_size(data.get());
  write_csv(dir / "data.csv",
            {{"r0", frit_record_signal(data.get(), FRIT_SIGNAL_R0)},
             {"u0", frit_record_signal(data.get(), FRIT_SIGNAL_U0)},
             {"y0", frit_record_signal(data.get(), FRIT_SIGNAL_Y0)}},
            rows);

  ordered_json config;
  config["controller"] = controller_json(spec);
  config["reference_model"] = model_json(md.get());
  frit_tf* raw_plant = nullptr;
  check(frit_case_plant(bench.get(), &raw_plant), "plant");
  const Tf plant(raw_plant);
  config["plant"] = model_json(plant.get());
  config["bounds"] = {{"lower", lower}, {"upper", upper}};
  config["theta0"] = theta0;
  config["pso"] = pso_json(pso);
  config["seeds"] = seeds;
  config["sim_time"] = frit_case_sim_time(bench.get());
  write_json(dir / "config.json", config);

  out << name << ": J(theta0) " << fmt(j0) << " (published " << fmt(pub_j0) << "), J(theta*) " << fmt(j_star)
      << " (published " << fmt(pub_j_star) << ") " << summary["status"].get<std::string>() << "\n";
  out << name << ": wrote " << dir.string() << "\n";
  write_comparison(o.out_dir, out);
  return kExitOk;
}

int cmd_tune(const std::string& config_path, const std::string& data_path, const Overrides& o, std::ostream& out) {
  const json config = read_json(config_path);
  const frit_controller_spec spec = parse_controller(config);
  const Tf md = parse_model(config, "reference_model", spec.sample_time);
  const json bounds = require<json>(config, "bounds", "");
  const auto lower = require<std::vector<double>>(bounds, "lower", "bounds.");
  const auto upper = require<std::vector<double>>(bounds, "upper", "bounds.");
  const auto theta0 = require<std::vector<double>>(config, "theta0", "");
  const frit_pso_config pso = parse_pso(config, o);
  const std::vector<std::uint64_t> seeds = resolve_seeds(o, config);

  const DataFile file = read_data_csv(data_path);
  if (file.sample_time && std::abs(*file.sample_time - spec.sample_time) > 1e-9 * spec.sample_time)
    throw Failure{kExitData, "sample time mismatch: data t column spacing " + fmt(*file.sample_time) +
                                 " differs from controller.sample_time " + fmt(spec.sample_time)};
  frit_record* raw = nullptr;
  check(frit_record_create(file.r0.data(), file.r0.size(), file.u0.data(), file.u0.size(), file.y0.data(),
                           file.y0.size(), spec.sample_time, &raw),
        "data");
  const Record data(raw);

  const Tuning tuning = run_tuning(data.get(), md.get(), spec, theta0, lower, upper, pso, seeds);
  const frit_tuning* t = tuning.get();
  const auto theta_star = fetch([t](std::size_t* n) { return frit_tuning_theta_star(t, n); });
  frit_tf* raw_c = nullptr;
  check(frit_controller_realize(&spec, theta_star.data(), theta_star.size(), &raw_c), "realize controller");
  const Tf controller(raw_c);

  frit_loss loss;
  frit_bound bound;
  frit_tuning_stats stats;
  frit_tuning_loss(tuning.get(), &loss);
  frit_tuning_bound(tuning.get(), &bound);
  frit_tuning_stats_get(tuning.get(), &stats);

  ordered_json result;
  result["controller"] = controller_json(spec);
  result["parameter_names"] = parameter_names(spec.kind);
  result["seeds"] = seeds;
  result["best_seed"] = stats.seed;
  result["theta0"] = theta0;
  result["theta_star"] = theta_star;
  result["theta_star_named"] = named(theta_star, spec.kind);
  result["j0"] = frit_tuning_j0(tuning.get());
  result["j_star"] = frit_tuning_j_star(tuning.get());
  result["realized_controller"] = model_json(controller.get());
  result["loss"] = loss_json(loss);
  result["stability_bound"] = bound_json(bound);
  result["search"] = stats_json(stats);
  result["runs"] = runs_json(tuning.get());

  const fs::path dir(o.out_dir);
  ensure_dir(dir);
  write_json(dir / "tune_result.json", result);
  write_trace_csv(dir / "trace.csv", tuning.get());
  out << "tune: J(theta0) " << fmt(frit_tuning_j0(tuning.get())) << ", J(theta*) "
      << fmt(frit_tuning_j_star(tuning.get())) << "; wrote " << (dir / "tune_result.json").string() << "\n";
  return kExitOk;
}

std::vector<double> parse_theta(const std::string& text) {
  std::vector<double> theta;
  for (const std::string& field : split(text, ',')) {
    const auto v = parse_double(field);
    if (!v) usage_error("--theta: '" + trim(field) + "' is not a number");
    theta.push_back(*v);
  }
  if (theta.empty()) usage_error("--theta is empty");
  return theta;
}

int cmd_validate(const std::string& config_path, const std::string& theta_text, const Overrides& o,
                 std::ostream& out, std::ostream& err) {
  const json config = read_json(config_path);
  const frit_controller_spec spec = parse_controller(config);
  const Tf plant = parse_model(config, "plant", spec.sample_time);
  const Tf md = parse_model(config, "reference_model", spec.sample_time);
  const std::vector<double> theta = parse_theta(theta_text);

  if (config.contains("bounds")) {
    const auto lower = get_or<std::vector<double>>(config.at("bounds"), "lower", {});
    const auto upper = get_or<std::vector<double>>(config.at("bounds"), "upper", {});
    bool inside = lower.size() == theta.size() && upper.size() == theta.size();
    for (std::size_t i = 0; inside && i < theta.size(); ++i) inside = theta[i] >= lower[i] && theta[i] <= upper[i];
    if (!inside) err << "warning: theta lies outside the configured bounds; validating anyway\n";
  }

  const double sim_time = get_or<double>(config, "sim_time", 100.0 * spec.sample_time);
  const auto horizon = static_cast<std::size_t>(std::llround(sim_time / spec.sample_time));
  const std::vector<double> r(horizon + 1, 1.0);
  frit_validation* raw = nullptr;
  check(frit_validate(plant.get(), md.get(), &spec, theta.data(), theta.size(), r.data(), r.size(), &raw),
        "validate");
  const Validation v(raw);

  ordered_json doc;
  doc["controller"] = controller_json(spec);
  doc["theta"] = theta;
  doc["theta_named"] = named(theta, spec.kind);
  doc["validation"] = validation_json(v.get(), true);
  const fs::path dir(o.out_dir);
  ensure_dir(dir);
  write_json(dir / "validation.json", doc);
  write_step_csv(dir / "validation_step.csv", v.get());

  frit_validation_summary s;
  frit_validation_summary_get(v.get(), &s);
  out << "validate: " << (s.stable ? "stable" : "NOT stable") << ", max |pole| " << fmt(s.max_pole_magnitude)
      << ", tracking error l1 " << fmt(s.tracking_error_l1) << "; wrote " << (dir / "validation.json").string()
      << "\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seeds", o.seeds, "Seed list: N, A..B or A,B,C (default: FRIT_SEED, else 1)");
  cmd->add_option("--swarm-size", o.swarm_size, "Particles per swarm")->check(CLI::PositiveNumber);
  cmd->add_option("--iterations", o.iterations, "Maximum PSO iterations")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", o.workers, "Objective-evaluation threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

std::vector<unsigned long long> parse_seed_list(const std::string& text) {
  auto parse_one = [&](const std::string& s) {
    const std::string t = trim(s);
    unsigned long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) usage_error("bad seed list '" + text + "'");
    return v;
  };
  std::vector<unsigned long long> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto first = parse_one(text.substr(0, dots));
    const auto last = parse_one(text.substr(dots + 2));
    if (last < first || last - first > 10000) usage_error("bad seed range '" + text + "'");
    for (auto s = first; s <= last; ++s) seeds.push_back(s);
    return seeds;
  }
  for (const std::string& field : split(text, ',')) seeds.push_back(parse_one(field));
  if (seeds.empty()) usage_error("bad seed list '" + text + "'");
  return seeds;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-driven FOPID/PID tuning from one closed-loop experiment", "frit_cli"};
  app.require_subcommand(1);
  Overrides o;

  std::string example;
  CLI::App* reproduce = app.add_subcommand("reproduce", "Run a builtin benchmark end to end");
  reproduce->add_option("example", example, "example1, example2, example3_io or example3_fo")->required();
  add_common(reproduce, o);
  reproduce->add_option("--out-dir", o.out_dir, "Output root (default out)");

  std::string config_path, data_path, theta_text;
  CLI::App* tune = app.add_subcommand("tune", "Tune a controller from a recorded experiment");
  tune->add_option("--config", config_path, "Run configuration (JSON)")->required();
  tune->add_option("--data", data_path, "Experiment CSV with columns k,r0,u0,y0")->required();
  add_common(tune, o);
  tune->add_option("--out-dir", o.out_dir, "Output directory (default out)");

  CLI::App* validate = app.add_subcommand("validate", "Check parameters against a plant model");
  validate->add_option("--config", config_path, "Run configuration with a plant section (JSON)")->required();
  validate->add_option("--theta", theta_text, "Comma-separated parameter vector")->required();
  validate->add_option("--out-dir", o.out_dir, "Output directory (default out)");

  std::vector<std::string> argv_store{"frit_cli"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (reproduce->parsed()) return cmd_reproduce(example, o, out);
    if (tune->parsed()) return cmd_tune(config_path, data_path, o, out);
    return cmd_validate(config_path, theta_text, o, out, err);
  } catch (const Failure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace frit_cli
