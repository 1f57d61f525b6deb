#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ramem/model.hpp"
#include "ramem/optimize.hpp"
#include "ramem/solver.hpp"

namespace ramem::cli {

enum class Command { simulate, optimize, sweep, hankel };
enum class SweepInput { signal, matched };
enum class HankelShape { flat, gaussian, two_hump };

std::string_view to_string(Command c);
std::optional<Command> command_from_string(std::string_view s);

struct SignalSpec {
  SignalKind kind = SignalKind::gaussian;
  double center = 0.0;
  double fwhm = 1.0;
  double peak = 1.0;
  double start = -1.0;
  double duration = 2.0;
  double amplitude = 1.0;
  std::optional<double> energy;

  SignalPulse build(TimeWindow window) const;
};

struct OptimizeSpec {
  DEConfig config;
  Parametrization parametrization = Parametrization::gaussian_ct;
  std::size_t spline_knots = 8;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
  SweepInput input = SweepInput::signal;
};

struct HankelSpec {
  std::optional<double> g;  // default: the write-stage bright coupling
  HankelShape shape = HankelShape::flat;
  std::size_t k_points = 101;
};

struct RunConfig {
  Command command = Command::simulate;
  PhysicalParams physical;
  TimeWindow window{-3.0, 3.0};
  SignalSpec signal;
  WaveformSpec write;
  WaveformSpec read;
  GridSpec grid;
  Mode mode = Mode::ideal_bright;
  Direction direction = Direction::backward;
  OptimizeSpec optimize;
  SweepSpec sweep;
  HankelSpec hankel;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  double n_a0 = 0.0;
  std::size_t fields_stride = 1;
  nlohmann::json document;  // validated source, kept for sweeps
};

/// Strict-key JSON configuration. Syntax problems raise Error{ParseError}
/// with line and column; schema problems raise Error{ValidationError} naming
/// the offending field path.
RunConfig parse_config(std::string_view text, std::optional<Command> command = std::nullopt);
RunConfig parse_config_document(const nlohmann::json& document,
                                std::optional<Command> command = std::nullopt);

/// One configuration per sweep value, each with the swept path overwritten.
std::vector<RunConfig> sweep_plan(const RunConfig& config);

/// Command-line flags override the matching config fields.
struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<GridSpec> grid;
  std::optional<Mode> mode;
};

/// Parses "NxM" (n_z x n_p).
GridSpec parse_grid(std::string_view text);
Mode parse_mode(std::string_view text);

void apply_overrides(RunConfig& config, const Overrides& overrides);

}  // namespace ramem::cli
