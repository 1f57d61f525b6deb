#include "ramem/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>

#include "ramem/error.hpp"

namespace ramem {

namespace {

// Uniform [0,1) from the raw 64-bit stream; the standard distributions are
// not specified bit-for-bit across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t index(std::size_t n) {
    return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1);
  }

 private:
  std::mt19937_64 engine_;
};

double reflect_into(double x, const Bounds& b) {
  const double width = b.hi - b.lo;
  double y = x;
  for (int k = 0; k < 64 && (y < b.lo || y > b.hi); ++k) {
    if (y < b.lo) y = 2.0 * b.lo - y;
    if (y > b.hi) y = 2.0 * b.hi - y;
  }
  if (y < b.lo || y > b.hi) y = b.lo + std::fmod(std::abs(y - b.lo), width);
  return y;
}

Evaluation safe_call(const Objective& objective, std::span<const double> x) {
  try {
    Evaluation e = objective(x);
    if (std::isnan(e.fitness)) {
      e.fitness = -std::numeric_limits<double>::infinity();
      if (e.failure.empty()) e.failure = "objective returned NaN";
    }
    return e;
  } catch (const std::exception& ex) {
    Evaluation e;
    e.failure = ex.what();
    return e;
  }
}

void evaluate_all(const Objective& objective, const std::vector<std::vector<double>>& points,
                  std::vector<Evaluation>& out, std::size_t threads) {
  out.assign(points.size(), Evaluation{});
  threads = std::max<std::size_t>(1, std::min(threads, points.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = safe_call(objective, points[i]);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < points.size(); i = next++) {
        out[i] = safe_call(objective, points[i]);
      }
    });
  }
  for (auto& th : pool) th.join();
}

TraceRecord record(std::size_t generation, const std::vector<Evaluation>& scores,
                   std::size_t best) {
  TraceRecord r;
  r.generation = generation;
  r.best_eta = scores[best].fitness;
  r.best_epsilon = scores[best].auxiliary;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : scores) {
    if (std::isfinite(s.fitness)) {
      sum += s.fitness;
      ++count;
    }
  }
  r.mean_eta = count > 0 ? sum / static_cast<double>(count)
                         : -std::numeric_limits<double>::infinity();
  return r;
}

std::size_t argmax(const std::vector<Evaluation>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].fitness > scores[best].fitness) best = i;
  }
  return best;
}

}  // namespace

void DEConfig::validate() const {
  if (population < 4) throw Error(ErrorCode::BadConfig, "population must be >= 4");
  if (bounds.empty()) throw Error(ErrorCode::BadConfig, "bounds must not be empty");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(bounds[i].lo < bounds[i].hi)) {
      throw Error(ErrorCode::BadConfig, "bounds[" + std::to_string(i) + "] needs lo < hi");
    }
  }
  if (!(f_weight > 0.0 && f_weight <= 2.0)) {
    throw Error(ErrorCode::BadConfig, "f_weight must lie in (0, 2]");
  }
  if (!(cr >= 0.0 && cr <= 1.0)) throw Error(ErrorCode::BadConfig, "cr must lie in [0, 1]");
  if (!(stall_tol >= 0.0)) throw Error(ErrorCode::BadConfig, "stall_tol must be >= 0");
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("RAMEM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

DEResult de_optimize(const Objective& objective, const DEConfig& config) {
  config.validate();
  const std::size_t np = config.population;
  const std::size_t dim = config.bounds.size();
  const std::size_t threads = config.threads > 0 ? config.threads : default_thread_count();
  Rng rng(config.seed);

  std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
  for (auto& x : pop) {
    for (std::size_t d = 0; d < dim; ++d) {
      const Bounds& b = config.bounds[d];
      x[d] = b.lo + rng.uniform() * (b.hi - b.lo);
    }
  }
  std::vector<Evaluation> scores;
  evaluate_all(objective, pop, scores, threads);

  DEResult result;
  result.evaluations = np;
  std::size_t best = argmax(scores);
  result.trace.push_back(record(0, scores, best));

  std::vector<std::vector<double>> trial(np, std::vector<double>(dim));
  std::vector<Evaluation> trial_scores;
  for (std::size_t gen = 1; gen <= config.generations; ++gen) {
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t r1, r2, r3;
      do r1 = rng.index(np); while (r1 == i);
      do r2 = rng.index(np); while (r2 == i || r2 == r1);
      do r3 = rng.index(np); while (r3 == i || r3 == r1 || r3 == r2);
      const std::size_t forced = rng.index(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        const double u = rng.uniform();
        if (d == forced || u < config.cr) {
          const double v = pop[r1][d] + config.f_weight * (pop[r2][d] - pop[r3][d]);
          trial[i][d] = reflect_into(v, config.bounds[d]);
        } else {
          trial[i][d] = pop[i][d];
        }
      }
    }
    evaluate_all(objective, trial, trial_scores, threads);
    result.evaluations += np;
    for (std::size_t i = 0; i < np; ++i) {
      if (trial_scores[i].fitness >= scores[i].fitness) {
        pop[i] = trial[i];
        scores[i] = trial_scores[i];
      }
    }
    best = argmax(scores);
    result.trace.push_back(record(gen, scores, best));
    result.generations_run = gen;

    if (gen >= config.stall_generations) {
      const double now = result.trace[gen].best_eta;
      const double then = result.trace[gen - config.stall_generations].best_eta;
      if (std::isfinite(then) && now - then <= config.stall_tol * std::abs(then)) {
        result.terminated_by = Termination::stall;
        break;
      }
    }
  }
  result.best_params = pop[best];
  result.best_eta = scores[best].fitness;
  result.best_epsilon = scores[best].auxiliary;
  return result;
}

DEResult de_optimize(const std::function<double(std::span<const double>)>& objective,
                     const DEConfig& config) {
  return de_optimize(
      Objective([&](std::span<const double> x) { return Evaluation{objective(x), 0.0, {}}; }),
      config);
}

ControlWaveform build_write_waveform(std::span<const double> x, const MemoryProblem& problem) {
  switch (problem.parametrization) {
    case Parametrization::gaussian_ct:
      if (x.size() != 2) {
        throw Error(ErrorCode::BadParams, "gaussian_ct expects {center, duration}");
      }
      return ControlWaveform::gaussian({x[0], x[1], 1.0}, problem.window);
    case Parametrization::spline_n: {
      if (x.size() < 4) throw Error(ErrorCode::BadParams, "spline_n expects >= 4 knots");
      SplineShape shape;
      const double t0 = problem.window.t0;
      const double span = problem.window.length();
      for (std::size_t k = 0; k < x.size(); ++k) {
        shape.knot_times.push_back(t0 + span * static_cast<double>(k) /
                                            static_cast<double>(x.size() - 1));
        shape.knot_amplitudes.push_back(x[k]);
      }
      shape.knot_times.back() = problem.window.t1;
      return ControlWaveform::spline(std::move(shape), problem.window);
    }
  }
  throw Error(ErrorCode::BadParams, "unknown parametrization");
}

Evaluation memory_objective(std::span<const double> x, const MemoryProblem& problem) {
  Evaluation e;
  try {
    const ControlWaveform write = build_write_waveform(x, problem);
    const MemoryResult m = full_memory(problem.params, write, problem.read_waveform,
                                       problem.signal, problem.grid, problem.mode,
                                       problem.direction);
    e.fitness = m.eta_total;
    if (problem.mode == Mode::full_fwm) {
      e.auxiliary = m.epsilon;
    } else {
      e.auxiliary = m.n_r > 0.0 ? m.n_a_estimate / m.n_r : 0.0;
    }
    if (!std::isfinite(e.fitness)) {
      e.fitness = -std::numeric_limits<double>::infinity();
      e.failure = "non-finite efficiency";
    }
  } catch (const std::exception& ex) {
    e.fitness = -std::numeric_limits<double>::infinity();
    e.failure = ex.what();
  }
  return e;
}

}  // namespace ramem
