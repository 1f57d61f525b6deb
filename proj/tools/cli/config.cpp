#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "ramem/error.hpp"

namespace ramem::cli {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ValidationError, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Reads one JSON object, remembering which keys were consumed so that
// anything left over can be rejected.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) invalid(path_.empty() ? "<root>" : path_, "must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  const std::string& base() const { return path_; }
  std::string path(const std::string& key) const { return join(path_, key); }

  const json* find(const std::string& key) {
    allowed_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) invalid(path(key), "must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) invalid(path(key), "must be finite");
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) {
      allowed_.insert(key);
      return std::nullopt;
    }
    return number(key, 0.0);
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v->get<std::int64_t>());
    }
    invalid(path(key), "must be a non-negative integer");
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) invalid(path(key), "must be a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return {};
    if (!v->is_array()) invalid(path(key), "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number()) invalid(path(key) + "[" + std::to_string(i) + "]", "must be a number");
      out.push_back(e.get<double>());
    }
    return out;
  }

  /// Nested object; an absent key yields an empty object.
  Reader object(const std::string& key) {
    const json* v = find(key);
    return v == nullptr ? Reader(empty(), path(key)) : Reader(*v, path(key));
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!allowed_.count(key)) invalid(path(key), "unknown key");
    }
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }

  const json& node_;
  std::string path_;
  std::set<std::string> allowed_;
};

template <typename T>
T choose(const std::string& path, const std::string& value,
         std::initializer_list<std::pair<const char*, T>> options) {
  for (const auto& [name, v] : options) {
    if (value == name) return v;
  }
  std::string names;
  for (const auto& [name, v] : options) names += std::string(names.empty() ? "" : ", ") + name;
  invalid(path, "unknown value '" + value + "' (expected one of " + names + ")");
}

PhysicalParams read_physical(Reader r) {
  PhysicalParams p;
  p.d = r.number("d", p.d);
  p.delta_s = r.number("delta_s", p.delta_s);
  p.delta_hf = r.number("delta_hf", p.delta_hf);
  p.w_write = r.number("w_write", p.w_write);
  p.w_read = r.number("w_read", p.w_read);
  const auto g_write = r.optional_number("g_write");
  const auto g_read = r.optional_number("g_read");
  r.finish();

  // A target bright coupling fixes the stage energy: g^2 = d W (1/ds^2 - 1/da^2).
  const double per_energy = p.d * (1.0 / (p.delta_s * p.delta_s) -
                                   1.0 / (p.delta_a() * p.delta_a()));
  auto energy_for = [&](const char* key, const char* energy_key, double g) {
    if (r.has(energy_key)) invalid(r.path(key), std::string("conflicts with ") + energy_key);
    if (!(g > 0.0)) invalid(r.path(key), "must be positive");
    if (!(per_energy > 0.0)) invalid(r.path(key), "couplings are degenerate for these params");
    return g * g / per_energy;
  };
  if (g_write) p.w_write = energy_for("g_write", "w_write", *g_write);
  if (g_read) p.w_read = energy_for("g_read", "w_read", *g_read);
  try {
    p.validate();
    derive_couplings(p, p.w_write);
    derive_couplings(p, p.w_read);
  } catch (const Error& e) {
    invalid(r.base(), e.what());
  }
  return p;
}

WaveformSpec read_waveform(Reader r, TimeWindow window) {
  WaveformSpec w;
  const std::string kind = r.string("kind", "gaussian");
  w.kind = choose<WaveformKind>(r.path("kind"), kind,
                                {{"gaussian", WaveformKind::gaussian},
                                 {"square", WaveformKind::square},
                                 {"spline", WaveformKind::spline}});
  switch (w.kind) {
    case WaveformKind::gaussian:
      w.gaussian.center = r.number("center", 0.5 * (window.t0 + window.t1));
      w.gaussian.tau = r.number("tau", window.length() / 6.0);
      w.gaussian.amplitude = r.number("amplitude", 1.0);
      break;
    case WaveformKind::square:
      w.square.start = r.number("start", window.t0);
      w.square.duration = r.number("duration", window.length());
      w.square.amplitude = r.number("amplitude", 1.0);
      break;
    case WaveformKind::spline:
      w.spline.knot_times = r.numbers("knot_times");
      w.spline.knot_amplitudes = r.numbers("knot_amplitudes");
      break;
  }
  r.finish();
  try {
    make_waveform(w, window);
  } catch (const Error& e) {
    invalid(r.base(), e.what());
  }
  return w;
}

SignalSpec read_signal(Reader r, TimeWindow window) {
  SignalSpec s;
  const std::string kind = r.string("kind", "gaussian");
  s.kind = choose<SignalKind>(r.path("kind"), kind,
                              {{"gaussian", SignalKind::gaussian}, {"flat", SignalKind::flat}});
  if (s.kind == SignalKind::gaussian) {
    s.center = r.number("center", 0.5 * (window.t0 + window.t1));
    s.fwhm = r.number("fwhm", window.length() / 6.0);
    s.peak = r.number("peak", 1.0);
  } else {
    s.start = r.number("start", window.t0);
    s.duration = r.number("duration", window.length());
    s.amplitude = r.number("amplitude", 1.0);
  }
  s.energy = r.optional_number("energy");
  r.finish();
  try {
    s.build(window);
  } catch (const Error& e) {
    invalid(r.base(), e.what());
  }
  return s;
}

GridSpec read_grid(Reader r) {
  GridSpec g;
  g.n_z = r.unsigned_integer("n_z", g.n_z);
  g.n_p = r.unsigned_integer("n_p", g.n_p);
  r.finish();
  if (g.n_z < kMinGridPoints) invalid(r.path("n_z"), "must be >= 32");
  if (g.n_p < kMinGridPoints) invalid(r.path("n_p"), "must be >= 32");
  return g;
}

OptimizeSpec read_optimize(Reader r, TimeWindow window, std::uint64_t seed) {
  OptimizeSpec o;
  DEConfig& c = o.config;
  c.population = r.unsigned_integer("population", c.population);
  c.generations = r.unsigned_integer("generations", c.generations);
  c.f_weight = r.number("f_weight", c.f_weight);
  c.cr = r.number("cr", c.cr);
  c.stall_tol = r.number("stall_tol", c.stall_tol);
  c.stall_generations = r.unsigned_integer("stall_generations", c.stall_generations);
  c.threads = r.unsigned_integer("threads", 0);
  c.seed = seed;
  o.parametrization = choose<Parametrization>(
      r.path("parametrization"), r.string("parametrization", "gaussian_ct"),
      {{"gaussian_ct", Parametrization::gaussian_ct}, {"spline_n", Parametrization::spline_n}});
  o.spline_knots = r.unsigned_integer("spline_knots", o.spline_knots);
  if (o.parametrization == Parametrization::spline_n && o.spline_knots < 4) {
    invalid(r.path("spline_knots"), "must be >= 4");
  }
  const std::size_t arity =
      o.parametrization == Parametrization::gaussian_ct ? 2 : o.spline_knots;

  if (const json* b = r.find("bounds")) {
    if (!b->is_array()) invalid(r.path("bounds"), "must be an array of [lo, hi] pairs");
    for (std::size_t i = 0; i < b->size(); ++i) {
      const json& pair = (*b)[i];
      const std::string p = r.path("bounds") + "[" + std::to_string(i) + "]";
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        invalid(p, "must be a [lo, hi] pair of numbers");
      }
      c.bounds.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    if (c.bounds.size() != arity) {
      invalid(r.path("bounds"), "expected " + std::to_string(arity) + " pairs for the parametrization");
    }
  } else if (o.parametrization == Parametrization::gaussian_ct) {
    const double quarter = 0.25 * window.length();
    c.bounds = {{window.t0 + quarter, window.t1 - quarter},
                {window.length() / 30.0, window.length() / 2.0}};
  } else {
    c.bounds.assign(arity, Bounds{0.0, 1.0});
  }
  r.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    invalid(r.base(), e.what());
  }
  return o;
}

SweepSpec read_sweep(Reader r, bool required) {
  SweepSpec s;
  s.parameter = r.string("parameter", "");
  s.values = r.numbers("values");
  s.input = choose<SweepInput>(r.path("input"), r.string("input", "signal"),
                               {{"signal", SweepInput::signal}, {"matched", SweepInput::matched}});
  r.finish();
  if (required) {
    if (s.parameter.empty()) invalid(r.path("parameter"), "is required for the sweep command");
    if (s.values.empty()) invalid(r.path("values"), "must be a non-empty list");
  }
  return s;
}

HankelSpec read_hankel(Reader r) {
  HankelSpec h;
  h.g = r.optional_number("g");
  if (h.g && !(*h.g > 0.0)) invalid(r.path("g"), "must be positive");
  h.shape = choose<HankelShape>(r.path("shape"), r.string("shape", "flat"),
                                {{"flat", HankelShape::flat},
                                 {"gaussian", HankelShape::gaussian},
                                 {"two_hump", HankelShape::two_hump}});
  h.k_points = r.unsigned_integer("k_points", h.k_points);
  if (h.k_points < 2) invalid(r.path("k_points"), "must be >= 2");
  r.finish();
  return h;
}

RunConfig parse_document(const json& document, std::optional<Command> command, bool check_sweep) {
  Reader root(document, "");
  RunConfig c;
  const std::string named = root.string("command", "");
  if (!named.empty()) {
    const auto parsed = command_from_string(named);
    if (!parsed) invalid("command", "unknown command '" + named + "'");
    if (command && *command != *parsed) {
      invalid("command", "config says '" + named + "' but '" + std::string(to_string(*command)) +
                             "' was requested");
    }
    c.command = *parsed;
  } else if (command) {
    c.command = *command;
  }

  Reader window = root.object("window");
  c.window.t0 = window.number("t0", c.window.t0);
  c.window.t1 = window.number("t1", c.window.t1);
  window.finish();
  if (!(c.window.t1 > c.window.t0)) invalid("window", "t1 must exceed t0");

  c.physical = read_physical(root.object("physical"));
  c.signal = read_signal(root.object("signal"), c.window);
  c.write = read_waveform(root.object("write"), c.window);
  c.read = read_waveform(root.object("read"), c.window);
  c.grid = read_grid(root.object("grid"));
  c.mode = parse_mode(root.string("mode", "ideal"));
  c.direction = choose<Direction>("direction", root.string("direction", "backward"),
                                  {{"backward", Direction::backward},
                                   {"forward", Direction::forward}});
  c.seed = root.unsigned_integer("seed", 0);
  c.optimize = read_optimize(root.object("de"), c.window, c.seed);
  c.sweep = read_sweep(root.object("sweep"), c.command == Command::sweep);
  c.hankel = read_hankel(root.object("hankel"));
  c.output_dir = root.string("output_dir", c.output_dir);
  c.n_a0 = root.number("n_a0", 0.0);
  if (c.n_a0 < 0.0) invalid("n_a0", "must be >= 0");
  c.fields_stride = root.unsigned_integer("fields_stride", 1);
  if (c.fields_stride < 1) invalid("fields_stride", "must be >= 1");
  root.finish();
  c.document = document;
  if (check_sweep && c.command == Command::sweep) sweep_plan(c);
  return c;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::optimize: return "optimize";
    case Command::sweep: return "sweep";
    case Command::hankel: return "hankel";
  }
  return "unknown";
}

std::optional<Command> command_from_string(std::string_view s) {
  for (Command c : {Command::simulate, Command::optimize, Command::sweep, Command::hankel}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

SignalPulse SignalSpec::build(TimeWindow window) const {
  SignalPulse p = kind == SignalKind::flat ? SignalPulse::flat(start, duration, amplitude, window)
                                           : SignalPulse::gaussian(center, fwhm, peak, window);
  return energy ? p.with_energy(*energy) : p;
}

RunConfig parse_config(std::string_view text, std::optional<Command> command) {
  json document;
  try {
    document = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("column"); pos != std::string::npos) {
      if (const auto colon = what.find(": ", pos); colon != std::string::npos) {
        what = what.substr(colon + 2);
      }
    }
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
  }
  return parse_config_document(document, command);
}

RunConfig parse_config_document(const json& document, std::optional<Command> command) {
  return parse_document(document, command, true);
}

std::vector<RunConfig> sweep_plan(const RunConfig& config) {
  const std::string& parameter = config.sweep.parameter;
  if (parameter.empty()) invalid("sweep.parameter", "is required for the sweep command");
  if (parameter.rfind("sweep", 0) == 0 || parameter == "command") {
    invalid("sweep.parameter", "cannot sweep '" + parameter + "'");
  }
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = parameter.find('.', start);
    parts.push_back(parameter.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); })) {
    invalid("sweep.parameter", "malformed path '" + parameter + "'");
  }

  std::vector<RunConfig> plan;
  plan.reserve(config.sweep.values.size());
  for (double value : config.sweep.values) {
    json doc = config.document;
    json* node = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->is_object()) invalid("sweep.parameter", "'" + parameter + "' does not exist");
      node = &(*node)[parts[i]];
      if (node->is_null()) *node = json::object();
    }
    if (!node->is_object()) invalid("sweep.parameter", "'" + parameter + "' does not exist");
    (*node)[parts.back()] = value;
    try {
      plan.push_back(parse_document(doc, config.command, false));
    } catch (const Error& e) {
      invalid("sweep.parameter", "value " + std::to_string(value) + " for '" + parameter +
                                     "' is invalid (" + e.what() + ")");
    }
  }
  return plan;
}

GridSpec parse_grid(std::string_view text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string_view::npos) invalid("--grid", "expected NxM");
  GridSpec g;
  const auto a = text.substr(0, x);
  const auto b = text.substr(x + 1);
  auto r1 = std::from_chars(a.data(), a.data() + a.size(), g.n_z);
  auto r2 = std::from_chars(b.data(), b.data() + b.size(), g.n_p);
  if (r1.ec != std::errc() || r1.ptr != a.data() + a.size() || r2.ec != std::errc() ||
      r2.ptr != b.data() + b.size()) {
    invalid("--grid", "expected NxM with positive integers");
  }
  if (g.n_z < kMinGridPoints || g.n_p < kMinGridPoints) invalid("--grid", "must be >= 32x32");
  return g;
}

Mode parse_mode(std::string_view text) {
  return choose<Mode>("mode", std::string(text),
                      {{"ideal", Mode::ideal_bright},
                       {"ideal_bright", Mode::ideal_bright},
                       {"fwm", Mode::full_fwm},
                       {"full_fwm", Mode::full_fwm}});
}

void apply_overrides(RunConfig& config, const Overrides& overrides) {
  json doc = config.document;
  if (overrides.output_dir) doc["output_dir"] = *overrides.output_dir;
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.grid) {
    doc["grid"]["n_z"] = overrides.grid->n_z;
    doc["grid"]["n_p"] = overrides.grid->n_p;
  }
  if (overrides.mode) doc["mode"] = *overrides.mode == Mode::full_fwm ? "fwm" : "ideal";
  config = parse_config_document(doc, config.command);
}

}  // namespace ramem::cli
