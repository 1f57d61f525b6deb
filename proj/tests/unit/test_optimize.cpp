#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <span>

#include "ramem/error.hpp"
#include "ramem/optimize.hpp"

using namespace ramem;

namespace {

double bowl(std::span<const double> x) {
  return -(x[0] - 0.3) * (x[0] - 0.3) - (x[1] + 0.7) * (x[1] + 0.7);
}

// Many local maxima; a stress case for reproducibility.
double rastrigin(std::span<const double> x) {
  double sum = 10.0 * double(x.size());
  for (double v : x) sum += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return -sum;
}

DEConfig box_config(std::size_t dim, double lo, double hi) {
  DEConfig c;
  c.bounds.assign(dim, {lo, hi});
  c.seed = 5;
  return c;
}

MemoryProblem memory_problem() {
  const TimeWindow window{-3.0, 3.0};
  PhysicalParams p;
  p.w_write = p.w_read = 4.0;
  return MemoryProblem{p,
                       SignalPulse::gaussian(0.0, 1.0, 1.0, window),
                       ControlWaveform::gaussian({0.0, 1.0, 1.0}, window),
                       window,
                       Parametrization::gaussian_ct,
                       {96, 96},
                       Mode::ideal_bright,
                       Direction::backward};
}

}  // namespace

TEST_CASE("finds the maximum of a quadratic") {
  DEConfig c = box_config(2, -2.0, 2.0);
  c.generations = 200;
  c.stall_tol = 0.0;
  const DEResult r = de_optimize(bowl, c);
  CHECK(r.best_params[0] == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(r.best_params[1] == doctest::Approx(-0.7).epsilon(1e-3));
  CHECK(r.best_eta > -1e-6);
}

TEST_CASE("same seed gives bit-identical runs for any thread count") {
  DEConfig c = box_config(4, -5.12, 5.12);
  c.generations = 40;
  c.threads = 1;
  const DEResult a = de_optimize(rastrigin, c);
  const DEResult b = de_optimize(rastrigin, c);
  c.threads = 4;
  const DEResult d = de_optimize(rastrigin, c);
  for (const DEResult* other : {&b, &d}) {
    CHECK(other->best_params == a.best_params);
    CHECK(other->best_eta == a.best_eta);
    REQUIRE(other->trace.size() == a.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(other->trace[i].best_eta == a.trace[i].best_eta);
      CHECK(other->trace[i].mean_eta == a.trace[i].mean_eta);
    }
  }
  c.seed = 6;
  CHECK(de_optimize(rastrigin, c).trace[0].mean_eta != a.trace[0].mean_eta);
}

TEST_CASE("evaluation budget and elitism") {
  DEConfig c = box_config(3, -5.12, 5.12);
  c.population = 10;
  c.generations = 25;
  c.stall_generations = 1000;
  std::atomic<std::size_t> calls{0};
  const DEResult r = de_optimize(
      [&](std::span<const double> x) {
        ++calls;
        return rastrigin(x);
      },
      c);
  CHECK(r.terminated_by == Termination::max_generations);
  CHECK(r.generations_run == 25);
  CHECK(r.evaluations == c.population * (r.generations_run + 1));
  CHECK(calls.load() == r.evaluations);
  CHECK(r.trace.size() == r.generations_run + 1);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].best_eta >= r.trace[i - 1].best_eta);
    CHECK(r.trace[i].generation == i);
    CHECK(r.trace[i].mean_eta <= r.trace[i].best_eta);
  }
}

TEST_CASE("trial points stay inside the box") {
  DEConfig c = box_config(3, 0.0, 1.0);
  c.f_weight = 2.0;
  c.generations = 30;
  std::atomic<bool> outside{false};
  de_optimize(
      [&](std::span<const double> x) {
        for (double v : x) {
          if (v < 0.0 || v > 1.0) outside = true;
        }
        return x[0] + x[1] - x[2];
      },
      c);
  CHECK_FALSE(outside.load());
}

TEST_CASE("a flat objective stops on stall") {
  DEConfig c = box_config(2, 0.0, 1.0);
  const DEResult r = de_optimize([](std::span<const double>) { return 1.0; }, c);
  CHECK(r.terminated_by == Termination::stall);
  CHECK(r.generations_run == c.stall_generations);
  CHECK(r.evaluations == c.population * (c.stall_generations + 1));
}

TEST_CASE("objective failures score -inf and do not stop the run") {
  DEConfig c = box_config(1, -1.0, 1.0);
  c.generations = 5;
  const DEResult r = de_optimize(
      [](std::span<const double> x) -> double {
        if (x[0] < 0.0) throw std::runtime_error("negative");
        return x[0];
      },
      c);
  CHECK(r.best_params[0] >= 0.0);
  CHECK(std::isfinite(r.best_eta));
}

TEST_CASE("invalid configurations") {
  auto code_of = [](const DEConfig& c) {
    try {
      c.validate();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  DEConfig c = box_config(2, 0.0, 1.0);
  CHECK_NOTHROW(c.validate());
  DEConfig bad = c;
  bad.population = 3;
  CHECK(code_of(bad) == ErrorCode::BadConfig);
  bad = c;
  bad.bounds.clear();
  CHECK(code_of(bad) == ErrorCode::BadConfig);
  bad = c;
  bad.bounds[1] = {1.0, 1.0};
  CHECK(code_of(bad) == ErrorCode::BadConfig);
  bad = c;
  bad.f_weight = 0.0;
  CHECK(code_of(bad) == ErrorCode::BadConfig);
  bad = c;
  bad.cr = 1.5;
  CHECK(code_of(bad) == ErrorCode::BadConfig);
  CHECK_THROWS_AS(de_optimize(bowl, bad), Error);
}

TEST_CASE("memory objective") {
  const MemoryProblem problem = memory_problem();
  const std::vector<double> good{0.0, 1.0};
  const Evaluation e = memory_objective(good, problem);
  CHECK(std::isfinite(e.fitness));
  CHECK(e.fitness > 0.0);
  CHECK(e.fitness < 1.0);
  CHECK(e.auxiliary > 0.0);
  CHECK(e.failure.empty());

  const std::vector<double> degenerate{0.0, -0.5};
  const Evaluation d = memory_objective(degenerate, problem);
  CHECK(d.fitness == -std::numeric_limits<double>::infinity());
  CHECK_FALSE(d.failure.empty());

  const std::vector<double> wrong_size{0.0};
  CHECK(memory_objective(wrong_size, problem).fitness == -std::numeric_limits<double>::infinity());
}

TEST_CASE("spline parametrization spans the window") {
  MemoryProblem problem = memory_problem();
  problem.parametrization = Parametrization::spline_n;
  const std::vector<double> knots{0.0, 0.5, 1.0, 0.5, 0.0};
  const ControlWaveform w = build_write_waveform(knots, problem);
  CHECK(w.spline_shape().knot_times.front() == -3.0);
  CHECK(w.spline_shape().knot_times.back() == 3.0);
  CHECK(w(0.0) == doctest::Approx(1.0));
}

TEST_CASE("optimized write control beats a flat one") {
  const MemoryProblem problem = memory_problem();
  DEConfig c;
  c.bounds = {{-1.5, 1.5}, {0.2, 3.0}};
  c.seed = 3;
  c.generations = 20;
  const DEResult r =
      de_optimize([&](std::span<const double> x) { return memory_objective(x, problem); }, c);
  const auto flat = ControlWaveform::square({-3.0, 6.0, 1.0}, problem.window);
  const MemoryResult base = full_memory(problem.params, flat, problem.read_waveform,
                                        problem.signal, problem.grid, problem.mode,
                                        problem.direction);
  CHECK(r.best_eta > base.eta_total);
}
