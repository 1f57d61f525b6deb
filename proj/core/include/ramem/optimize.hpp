#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ramem/model.hpp"
#include "ramem/solver.hpp"

namespace ramem {

struct Bounds {
  double lo = 0.0;
  double hi = 1.0;
};

struct DEConfig {
  std::size_t population = 24;
  std::size_t generations = 60;
  double f_weight = 0.7;
  double cr = 0.9;
  std::uint64_t seed = 0;
  std::vector<Bounds> bounds;
  double stall_tol = 1e-4;
  std::size_t stall_generations = 8;
  std::size_t threads = 0;  // 0: RAMEM_THREADS, else hardware concurrency

  /// Throws Error{BadConfig}.
  void validate() const;
};

/// One objective call: fitness to maximise plus an auxiliary value carried
/// into the trace (the noise ratio for memory objectives).
struct Evaluation {
  double fitness = -std::numeric_limits<double>::infinity();
  double auxiliary = 0.0;
  std::string failure;
};

using Objective = std::function<Evaluation(std::span<const double>)>;

struct TraceRecord {
  std::size_t generation = 0;
  double best_eta = 0.0;
  double best_epsilon = 0.0;
  double mean_eta = 0.0;  // over members with finite fitness
};

enum class Termination { stall, max_generations };

struct DEResult {
  std::vector<double> best_params;
  double best_eta = -std::numeric_limits<double>::infinity();
  double best_epsilon = 0.0;
  std::vector<TraceRecord> trace;  // generation 0 is the initial population
  std::size_t evaluations = 0;
  std::size_t generations_run = 0;
  Termination terminated_by = Termination::max_generations;
};

/// DE/rand/1/bin with reflection into the box and greedy (>=) selection.
/// Every random draw happens on the calling thread in a fixed order, and a
/// generation's evaluations are collected before selection, so the result
/// depends only on (seed, config, objective) whatever the thread count.
/// An objective that throws scores -inf.
DEResult de_optimize(const Objective& objective, const DEConfig& config);
DEResult de_optimize(const std::function<double(std::span<const double>)>& objective,
                     const DEConfig& config);

/// Worker count from RAMEM_THREADS, falling back to hardware concurrency.
std::size_t default_thread_count();

enum class Parametrization { gaussian_ct, spline_n };

/// Everything a memory objective keeps fixed while the write waveform varies.
struct MemoryProblem {
  PhysicalParams params;
  SignalPulse signal;
  ControlWaveform read_waveform;
  TimeWindow window;
  Parametrization parametrization = Parametrization::gaussian_ct;
  GridSpec grid{128, 128};
  Mode mode = Mode::ideal_bright;
  Direction direction = Direction::backward;
};

/// gaussian_ct: {center, tau}; spline_n: n >= 4 knot amplitudes on uniform
/// knots spanning the window.
ControlWaveform build_write_waveform(std::span<const double> x, const MemoryProblem& problem);

/// Fitness is eta = (N_r - N_a)/N_in; auxiliary is epsilon (the spinwave
/// estimate in ideal mode). Invalid waveforms score -inf with the reason.
Evaluation memory_objective(std::span<const double> x, const MemoryProblem& problem);

}  // namespace ramem
