#include "highgain/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "highgain/errors.hpp"

namespace highgain {

namespace {

using nlohmann::json;

std::string field(const std::string& section, const char* key) {
  return section.empty() ? std::string(key) : section + "." + key;
}

void reject_unknown(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw InvalidArgument(section + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw InvalidArgument("unknown key " + (section.empty() ? "" : section + ".") + item.key());
  }
}

double get_double(const json& obj, const std::string& section, const char* key) {
  const std::string name = field(section, key);
  if (!obj.contains(key)) throw InvalidArgument(name + " is required");
  const json& v = obj.at(key);
  if (!v.is_number()) throw InvalidArgument(name + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InvalidArgument(name + " must be finite");
  return d;
}

std::size_t get_count(const json& obj, const std::string& section, const char* key) {
  const std::string name = field(section, key);
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw InvalidArgument(name + " must be a non-negative integer");
  return v.get<std::size_t>();
}

std::string get_string(const json& obj, const std::string& section, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw InvalidArgument(field(section, key) + " must be a string");
  return v.get<std::string>();
}

template <class Parse>
auto get_enum(const json& obj, const std::string& section, const char* key, Parse parse) {
  const std::string text = get_string(obj, section, key);
  try {
    return parse(text);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(field(section, key) + ": " + e.what());
  }
}

ProcessSpec parse_process(const json& j) {
  reject_unknown(j, "process", {"kind", "sigma", "coupling", "kp_slope", "k1_slope", "k2_slope", "length"});
  ProcessSpec p;
  if (!j.contains("kind")) throw InvalidArgument("process.kind is required");
  p.kind = get_enum(j, "process", "kind", parse_process_kind);
  p.sigma = get_double(j, "process", "sigma");
  p.coupling = j.contains("coupling") ? get_double(j, "process", "coupling") : 0.0;
  p.kp_slope = get_double(j, "process", "kp_slope");
  p.k1_slope = get_double(j, "process", "k1_slope");
  p.k2_slope = get_double(j, "process", "k2_slope");
  p.length = get_double(j, "process", "length");
  return p;
}

json process_json(const ProcessSpec& p) {
  return json{{"kind", std::string(to_string(p.kind))},
              {"sigma", p.sigma},
              {"coupling", p.coupling},
              {"kp_slope", p.kp_slope},
              {"k1_slope", p.k1_slope},
              {"k2_slope", p.k2_slope},
              {"length", p.length}};
}

}  // namespace

std::string_view to_string(OutputFormat format) { return format == OutputFormat::Csv ? "csv" : "json"; }

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw InvalidArgument("unknown output format '" + std::string(text) + "' (expected csv or json)");
}

std::vector<double> SweepConfig::values() const {
  if (!gammas.empty()) return gammas;
  std::vector<double> out;
  if (!min || !max || !steps) return out;
  const std::size_t n = *steps;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(*min + t * (*max - *min));
  }
  return out;
}

void RunConfig::check() const {
  process.validate();
  if (grid.n < 2) throw InvalidArgument("grid.n must be >= 2");
  if (grid.nu_min.has_value() != grid.nu_max.has_value()) {
    throw InvalidArgument("grid.nu_min and grid.nu_max must be given together");
  }
  if (grid.nu_min && !(*grid.nu_max > *grid.nu_min)) throw InvalidArgument("grid.nu_max must exceed grid.nu_min");
  if (z_steps < 2) throw InvalidArgument("zgrid.m must be >= 2");
  if (!(solver.tol > 0.0)) throw InvalidArgument("solver.tol must be > 0");
  if (solver.max_iter < 1) throw InvalidArgument("solver.max_iter must be >= 1");
  if (output.path.empty()) throw InvalidArgument("output.path must not be empty");
  if (output.modes < 1) throw InvalidArgument("output.modes must be >= 1");
  if (threads < 1) throw InvalidArgument("threads must be >= 1");
  if (sweep) {
    const bool list = !sweep->gammas.empty();
    const bool range = sweep->min || sweep->max || sweep->steps;
    if (list == range) throw InvalidArgument("sweep needs either gammas or min/max/steps");
    if (range) {
      if (!sweep->min || !sweep->max || !sweep->steps) throw InvalidArgument("sweep.min, sweep.max and sweep.steps go together");
      if (*sweep->steps < 1) throw InvalidArgument("sweep.steps must be >= 1");
      if (*sweep->min < 0.0 || *sweep->max < *sweep->min) throw InvalidArgument("sweep needs 0 <= min <= max");
    }
    for (double g : sweep->values()) {
      if (!std::isfinite(g) || g < 0.0) throw InvalidArgument("sweep couplings must be finite and >= 0");
    }
  }
  if (target && (!std::isfinite(target->value) || target->value < 0.0)) {
    throw InvalidArgument("target.value must be finite and >= 0");
  }
}

FrequencyGrid RunConfig::frequency_grid() const {
  if (grid.nu_min) return FrequencyGrid(grid.n, *grid.nu_min, *grid.nu_max);
  return default_grid(process, grid.n);
}

ZGrid RunConfig::z_grid() const { return ZGrid(z_steps, process.length); }

SolverOptions RunConfig::solver_options() const { return SolverOptions{solver.tol, solver.max_iter, solver.scheme}; }

bool operator==(const SweepConfig& a, const SweepConfig& b) {
  return a.gammas == b.gammas && a.min == b.min && a.max == b.max && a.steps == b.steps;
}

bool operator==(const TargetConfig& a, const TargetConfig& b) {
  return a.metric == b.metric && a.value == b.value && a.branch == b.branch;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  const auto& p = a.process;
  const auto& q = b.process;
  return p.kind == q.kind && p.sigma == q.sigma && p.coupling == q.coupling && p.kp_slope == q.kp_slope &&
         p.k1_slope == q.k1_slope && p.k2_slope == q.k2_slope && p.length == q.length && a.grid.n == b.grid.n &&
         a.grid.nu_min == b.grid.nu_min && a.grid.nu_max == b.grid.nu_max && a.z_steps == b.z_steps &&
         a.solver.tol == b.solver.tol && a.solver.max_iter == b.solver.max_iter && a.solver.model == b.solver.model &&
         a.solver.scheme == b.solver.scheme && a.output.path == b.output.path &&
         a.output.format == b.output.format && a.output.modes == b.output.modes && a.sweep == b.sweep &&
         a.target == b.target && a.validate == b.validate && a.threads == b.threads;
}

RunConfig preset(std::string_view name) {
  RunConfig c;
  if (name == "fc_paper") {
    c.process.kind = ProcessKind::FC;
    c.process.sigma = 0.98190;
  } else if (name == "pdc_paper") {
    c.process.kind = ProcessKind::PDC;
    c.process.sigma = 0.96231155;
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) + "' (expected fc_paper or pdc_paper)");
  }
  c.process.coupling = 0.0;
  c.process.kp_slope = 3.0;
  c.process.k1_slope = 4.5;
  c.process.k2_slope = 1.5;
  c.process.length = 2.0;
  c.output.path = std::string(name) + "_out";
  return c;
}

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, "", {"process", "grid", "zgrid", "solver", "output", "sweep", "target", "validate", "threads"});
  RunConfig c;
  if (!j.contains("process")) throw InvalidArgument("process section is required");
  c.process = parse_process(j.at("process"));

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, "grid", {"n", "nu_min", "nu_max"});
    if (g.contains("n")) c.grid.n = get_count(g, "grid", "n");
    if (g.contains("nu_min")) c.grid.nu_min = get_double(g, "grid", "nu_min");
    if (g.contains("nu_max")) c.grid.nu_max = get_double(g, "grid", "nu_max");
  }
  if (j.contains("zgrid")) {
    const json& z = j.at("zgrid");
    reject_unknown(z, "zgrid", {"m"});
    if (z.contains("m")) c.z_steps = get_count(z, "zgrid", "m");
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, "solver", {"tol", "max_iter", "model", "scheme"});
    if (s.contains("tol")) c.solver.tol = get_double(s, "solver", "tol");
    if (s.contains("max_iter")) {
      if (!s.at("max_iter").is_number_integer()) throw InvalidArgument("solver.max_iter must be an integer");
      c.solver.max_iter = s.at("max_iter").get<int>();
    }
    if (s.contains("model")) c.solver.model = get_enum(s, "solver", "model", parse_model);
    if (s.contains("scheme")) c.solver.scheme = get_enum(s, "solver", "scheme", parse_scheme);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"path", "format", "modes"});
    if (o.contains("path")) c.output.path = get_string(o, "output", "path");
    if (o.contains("format")) c.output.format = get_enum(o, "output", "format", parse_output_format);
    if (o.contains("modes")) c.output.modes = get_count(o, "output", "modes");
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    reject_unknown(s, "sweep", {"gammas", "min", "max", "steps"});
    SweepConfig sw;
    if (s.contains("gammas")) {
      if (!s.at("gammas").is_array()) throw InvalidArgument("sweep.gammas must be an array");
      for (const json& g : s.at("gammas")) {
        if (!g.is_number()) throw InvalidArgument("sweep.gammas must contain numbers");
        sw.gammas.push_back(g.get<double>());
      }
    }
    if (s.contains("min")) sw.min = get_double(s, "sweep", "min");
    if (s.contains("max")) sw.max = get_double(s, "sweep", "max");
    if (s.contains("steps")) sw.steps = get_count(s, "sweep", "steps");
    c.sweep = sw;
  }
  if (j.contains("target")) {
    const json& t = j.at("target");
    reject_unknown(t, "target", {"metric", "value", "branch"});
    TargetConfig tc;
    if (!t.contains("metric")) throw InvalidArgument("target.metric is required");
    tc.metric = get_enum(t, "target", "metric", parse_target_metric);
    tc.value = get_double(t, "target", "value");
    if (t.contains("branch")) tc.branch = get_enum(t, "target", "branch", parse_branch);
    c.target = tc;
  }
  if (j.contains("validate")) {
    if (!j.at("validate").is_boolean()) throw InvalidArgument("validate must be true or false");
    c.validate = j.at("validate").get<bool>();
  }
  if (j.contains("threads")) c.threads = get_count(j, "", "threads");
  c.check();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& c) {
  json j;
  j["process"] = process_json(c.process);
  json grid{{"n", c.grid.n}};
  if (c.grid.nu_min) grid["nu_min"] = *c.grid.nu_min;
  if (c.grid.nu_max) grid["nu_max"] = *c.grid.nu_max;
  j["grid"] = grid;
  j["zgrid"] = json{{"m", c.z_steps}};
  j["solver"] = json{{"tol", c.solver.tol},
                     {"max_iter", c.solver.max_iter},
                     {"model", std::string(to_string(c.solver.model))},
                     {"scheme", std::string(to_string(c.solver.scheme))}};
  j["output"] = json{{"path", c.output.path},
                     {"format", std::string(to_string(c.output.format))},
                     {"modes", c.output.modes}};
  if (c.sweep) {
    json s = json::object();
    if (!c.sweep->gammas.empty()) s["gammas"] = c.sweep->gammas;
    if (c.sweep->min) s["min"] = *c.sweep->min;
    if (c.sweep->max) s["max"] = *c.sweep->max;
    if (c.sweep->steps) s["steps"] = *c.sweep->steps;
    j["sweep"] = s;
  }
  if (c.target) {
    j["target"] = json{{"metric", std::string(to_string(c.target->metric))},
                       {"value", c.target->value},
                       {"branch", std::string(to_string(c.target->branch))}};
  }
  j["validate"] = c.validate;
  j["threads"] = c.threads;
  return j.dump(2) + "\n";
}

void save_config(const RunConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file " + path);
  out << dump_config(config);
  if (!out) throw std::runtime_error("failed writing config file " + path);
}

}  // namespace highgain
