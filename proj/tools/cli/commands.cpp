#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "ramem/error.hpp"
#include "ramem/fwm.hpp"
#include "ramem/hankel.hpp"
#include "ramem/optimize.hpp"
#include "ramem/quadrature.hpp"
#include "ramem/solver.hpp"

namespace ramem::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

namespace {

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

fs::path prepare_output(const RunConfig& config) {
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

std::string_view mode_name(Mode m) { return m == Mode::full_fwm ? "fwm" : "ideal"; }
std::string_view direction_name(Direction d) {
  return d == Direction::backward ? "backward" : "forward";
}

json couplings_json(const DerivedCouplings& c) {
  return {{"g_s", c.g_s},         {"g_a", c.g_a},     {"g", c.g},
          {"delta_k", c.delta_k}, {"xi", c.xi},       {"stark", c.stark},
          {"energy", c.energy}};
}

json physical_json(const PhysicalParams& p) {
  return {{"d", p.d},
          {"delta_s", p.delta_s},
          {"delta_hf", p.delta_hf},
          {"w_write", p.w_write},
          {"w_read", p.w_read}};
}

json header_json(const RunConfig& config) {
  return {{"schema_version", kSchemaVersion},
          {"command", std::string(to_string(config.command))},
          {"mode", std::string(mode_name(config.mode))},
          {"direction", std::string(direction_name(config.direction))},
          {"grid", {{"n_z", config.grid.n_z}, {"n_p", config.grid.n_p}}},
          {"physical", physical_json(config.physical)}};
}

void write_fields(const fs::path& path, const FieldEvolution& f, std::size_t stride) {
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < f.p_grid.size(); j += stride) {
    for (std::size_t i = 0; i < f.z_grid.size(); i += stride) {
      rows.push_back({f.z_grid[i], f.p_grid[j], std::abs(f.s(i, j)), std::abs(f.a_s(i, j)),
                      std::abs(f.a_a_dag(i, j))});
    }
  }
  write_csv(path, {"z", "p", "abs_s", "abs_as", "abs_aa"}, rows);
}

struct Scenario {
  ControlWaveform write;
  ControlWaveform read;
  SignalPulse signal;
};

Scenario scenario(const RunConfig& c) {
  return {make_waveform(c.write, c.window), make_waveform(c.read, c.window),
          c.signal.build(c.window)};
}

std::string simulate(const RunConfig& config) {
  const fs::path dir = prepare_output(config);
  const Scenario s = scenario(config);
  const MemoryResult m = full_memory(config.physical, s.write, s.read, s.signal, config.grid,
                                     config.mode, config.direction);
  const NoiseReport noise = noise_metrics(m, m.write_couplings);

  json doc = header_json(config);
  doc["couplings"] = {{"write", couplings_json(m.write_couplings)},
                      {"read", couplings_json(m.read_couplings)}};
  doc["result"] = {{"eta_w", m.eta_w},
                   {"eta_r", m.eta_r},
                   {"eta_total", m.eta_total},
                   {"epsilon", noise.epsilon},
                   {"n_in", m.n_in},
                   {"n_r", m.n_r},
                   {"n_a", noise.n_a},
                   {"n_a_estimate", m.n_a_estimate},
                   {"mu1", m.eta_total != 0.0 ? noise.n_a / m.eta_total : 0.0},
                   {"leak", m.write.leak},
                   {"residual", m.read.residual},
                   {"support_width", noise.support_width},
                   {"e_a_out", {{"re", noise.e_a_out.real()}, {"im", noise.e_a_out.imag()}}}};
  write_json(dir / "result.json", doc);
  write_fields(dir / "fields.csv", m.write.fields, config.fields_stride);
  write_fields(dir / "fields_read.csv", m.read.fields, config.fields_stride);

  std::ostringstream out;
  out << "simulate eta=" << format_double(m.eta_total) << " epsilon=" << format_double(noise.epsilon)
      << " eta_w=" << format_double(m.eta_w) << " eta_r=" << format_double(m.eta_r)
      << " out=" << dir.string();
  return out.str();
}

std::string optimize(const RunConfig& config) {
  const fs::path dir = prepare_output(config);
  const Scenario s = scenario(config);
  const MemoryProblem problem{config.physical, s.signal,   s.read,      config.window,
                              config.optimize.parametrization, config.grid, config.mode,
                              config.direction};
  const DEResult r = de_optimize(
      Objective([&](std::span<const double> x) { return memory_objective(x, problem); }),
      config.optimize.config);

  std::vector<std::vector<double>> trace;
  for (const auto& t : r.trace) {
    trace.push_back({static_cast<double>(t.generation), t.best_eta, t.best_epsilon, t.mean_eta});
  }
  write_csv(dir / "de_trace.csv", {"generation", "best_eta", "best_epsilon", "mean_eta"}, trace);

  std::vector<std::vector<double>> wave;
  if (std::isfinite(r.best_eta)) {
    const ControlWaveform best =
        build_write_waveform(r.best_params, problem).with_energy(config.physical.w_write);
    const RealVector t = uniform_grid(1001, config.window.t0, config.window.t1);
    for (double ti : t) wave.push_back({ti, best(ti)});
  }
  write_csv(dir / "best_waveform.csv", {"t", "omega"}, wave);

  json doc = header_json(config);
  doc["optimize"] = {
      {"parametrization",
       config.optimize.parametrization == Parametrization::gaussian_ct ? "gaussian_ct" : "spline_n"},
      {"seed", config.optimize.config.seed},
      {"population", config.optimize.config.population},
      {"best_params", r.best_params},
      {"best_eta", r.best_eta},
      {"best_epsilon", r.best_epsilon},
      {"evaluations", r.evaluations},
      {"generations_run", r.generations_run},
      {"terminated_by", r.terminated_by == Termination::stall ? "stall" : "max_generations"}};
  write_json(dir / "result.json", doc);

  std::ostringstream out;
  out << "optimize best_eta=" << format_double(r.best_eta)
      << " best_epsilon=" << format_double(r.best_epsilon) << " generations=" << r.generations_run
      << " evaluations=" << r.evaluations << " out=" << dir.string();
  return out.str();
}

struct SweepRow {
  double eta = 0.0;
  double epsilon = 0.0;
  double n_a = 0.0;
};

SweepRow sweep_row(const RunConfig& c) {
  MemoryResult m = [&] {
    if (c.sweep.input == SweepInput::signal) {
      const Scenario s = scenario(c);
      return full_memory(c.physical, s.write, s.read, s.signal, c.grid, c.mode, c.direction);
    }
    const DerivedCouplings cw = derive_couplings(c.physical, c.physical.w_write);
    const DerivedCouplings cr = derive_couplings(c.physical, c.physical.w_read);
    PowerIterationResult mode;
    try {
      mode = optimal_mode_power_iteration(cw.g, cr.g, c.grid, 2000, c.direction);
    } catch (const NoConvergenceError& e) {
      mode = e.last();
    }
    // Inject the bright-mode optimum: with no anti-Stokes input b = (g_s/g) a_s.
    ComplexVector a_in = mode.b_opt;
    if (c.mode == Mode::full_fwm) {
      for (auto& v : a_in) v *= cw.g / cw.g_s;
    }
    return memory_from_normalized(cw, cr, a_in, unit_energy(a_in), c.grid, c.mode, c.direction);
  }();
  const NoiseReport noise = noise_metrics(m, m.write_couplings);
  const double n_a = noise.n_a + c.n_a0;
  return {m.eta_total, n_a / m.n_r, n_a};
}

std::string sweep(const RunConfig& config) {
  const fs::path dir = prepare_output(config);
  const std::vector<RunConfig> plan = sweep_plan(config);
  std::vector<SweepRow> rows(plan.size());
  std::vector<std::string> failures(plan.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      try {
        rows[i] = sweep_row(plan[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const std::size_t n_threads = std::min(default_thread_count(), std::max<std::size_t>(1, plan.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!failures[i].empty()) {
      throw Error(ErrorCode::NonFiniteField,
                  "sweep row " + std::to_string(i) + " failed: " + failures[i]);
    }
  }

  std::vector<std::vector<double>> table;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    table.push_back({config.sweep.values[i], rows[i].eta, rows[i].epsilon, rows[i].n_a});
  }
  write_csv(dir / "sweep.csv", {"axis", "eta", "epsilon", "n_a"}, table);

  std::ostringstream out;
  out << "sweep parameter=" << config.sweep.parameter << " rows=" << table.size()
      << " out=" << dir.string();
  return out.str();
}

ComplexVector hankel_input(HankelShape shape, std::size_t n) {
  const RealVector p = uniform_grid(n);
  ComplexVector b(n);
  for (std::size_t j = 0; j < n; ++j) {
    switch (shape) {
      case HankelShape::flat: b[j] = 1.0; break;
      case HankelShape::gaussian: b[j] = std::exp(-std::pow((p[j] - 0.5) / 0.15, 2)); break;
      case HankelShape::two_hump:
        b[j] = std::exp(-std::pow((p[j] - 0.3) / 0.08, 2)) +
               0.6 * std::exp(-std::pow((p[j] - 0.7) / 0.1, 2));
        break;
    }
  }
  return b;
}

std::string hankel(const RunConfig& config) {
  const fs::path dir = prepare_output(config);
  const double g = config.hankel.g ? *config.hankel.g
                                   : derive_couplings(config.physical, config.physical.w_write).g;
  const ComplexVector b_in = hankel_input(config.hankel.shape, config.grid.n_p);
  const ComplexVector vacuum_p(config.grid.n_p, cplx(0.0));
  const ComplexVector empty_z(config.grid.n_z, cplx(0.0));
  const FieldEvolution num = solve_normalized(DerivedCouplings::bright(g), b_in, vacuum_p, empty_z,
                                              config.grid, Mode::ideal_bright);
  const AnalyticFields ref = analytic_fields(b_in, empty_z, g, config.grid);

  const std::size_t last = config.grid.n_p - 1;
  const auto stored = num.s.level(last);
  const auto stored_ref = ref.s.level(last);
  const double e_in = unit_energy(b_in);

  json doc = header_json(config);
  doc["hankel"] = {{"g", g},
                   {"shape", config.hankel.shape == HankelShape::flat       ? "flat"
                             : config.hankel.shape == HankelShape::gaussian ? "gaussian"
                                                                            : "two_hump"},
                   {"rel_l2_s", relative_l2(num.s, ref.s)},
                   {"rel_l2_b", relative_l2(num.b, ref.b)},
                   {"eta_w_solver", unit_energy(stored) / e_in},
                   {"eta_w_analytic", unit_energy(stored_ref) / e_in}};
  write_json(dir / "oracle_diff.json", doc);

  const RealVector k = uniform_grid(config.hankel.k_points);
  const HankelSpectrum spec = hankel_spectrum(stored, 1.0, SpectralAxis::spatial_kz, g, k);
  std::vector<std::vector<double>> rows;
  for (std::size_t q = 0; q < k.size(); ++q) {
    rows.push_back({k[q], spec.values[q].real(), spec.values[q].imag()});
  }
  write_csv(dir / "spectrum.csv", {"k", "re", "im"}, rows);

  std::ostringstream out;
  out << "hankel g=" << format_double(g)
      << " rel_l2_s=" << format_double(doc["hankel"]["rel_l2_s"].get<double>())
      << " rel_l2_b=" << format_double(doc["hankel"]["rel_l2_b"].get<double>())
      << " out=" << dir.string();
  return out.str();
}

bool is_validation(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::BadConfig:
    case ErrorCode::BadParams:
    case ErrorCode::BadWaveformParams:
    case ErrorCode::CouplingDegenerate:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

}  // namespace

std::string run_command(const RunConfig& config) {
  switch (config.command) {
    case Command::simulate: return simulate(config);
    case Command::optimize: return optimize(config);
    case Command::sweep: return sweep(config);
    case Command::hankel: return hankel(config);
  }
  throw Error(ErrorCode::ValidationError, "command: unknown");
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Raman quantum memory simulator and pulse optimizer", "ramem"};
  std::string command_name;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string grid_text;
  std::string mode_text;
  app.add_option("command", command_name, "simulate | optimize | sweep | hankel")
      ->required()
      ->check(CLI::IsMember({"simulate", "optimize", "sweep", "hankel"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* grid_opt = app.add_option("--grid", grid_text, "grid as NxM (n_z x n_p)");
  auto* mode_opt = app.add_option("--mode", mode_text, "ideal | fwm")
                       ->check(CLI::IsMember({"ideal", "fwm"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: ValidationError: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }

  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + config_path);
    std::stringstream text;
    text << in.rdbuf();
    RunConfig config = parse_config(text.str(), command_from_string(command_name));

    Overrides o;
    if (*out_opt) o.output_dir = out_dir;
    if (*seed_opt) o.seed = seed;
    if (*grid_opt) o.grid = parse_grid(grid_text);
    if (*mode_opt) o.mode = parse_mode(mode_text);
    apply_overrides(config, o);

    out << run_command(config) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << one_line(e.what()) << '\n';
    return is_validation(e.code()) ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: Internal: " << one_line(e.what()) << '\n';
    return kExitNumerical;
  }
}

}  // namespace ramem::cli
