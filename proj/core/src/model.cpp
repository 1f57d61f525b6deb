#include "ramem/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ramem/error.hpp"
#include "ramem/quadrature.hpp"

namespace ramem {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {
    0.0, -0.5384693101056830910363144, 0.5384693101056830910363144,
    -0.9061798459386639927976269, 0.9061798459386639927976269};
constexpr std::array<double, 5> kGaussWeights = {
    0.5688888888888888888888889, 0.4786286704993664680412915,
    0.4786286704993664680412915, 0.2369268850561890875152781,
    0.2369268850561890875152781};

template <typename F>
double gauss_legendre(F&& f, double a, double b, int panels) {
  double sum = 0.0;
  const double width = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * width;
    const double half = 0.5 * width;
    const double mid = lo + half;
    double panel = 0.0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
      panel += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
    }
    sum += half * panel;
  }
  return sum;
}

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

void check_window(const TimeWindow& window) {
  if (!(window.t1 > window.t0) || !std::isfinite(window.t0) || !std::isfinite(window.t1)) {
    throw Error(ErrorCode::BadWaveformParams, "time window must satisfy t0 < t1");
  }
}

// Three-point end slope, kept shape-preserving (as in Fritsch-Carlson PCHIP).
double pchip_edge(double h0, double h1, double m0, double m1) {
  double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
  if (std::signbit(d) != std::signbit(m0) || m0 == 0.0) {
    d = 0.0;
  } else if (std::signbit(m0) != std::signbit(m1) && std::abs(d) > 3.0 * std::abs(m0)) {
    d = 3.0 * m0;
  }
  return d;
}

}  // namespace

void PhysicalParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::BadParams, what); };
  if (!(d > 0.0)) fail("optical depth d must be > 0");
  if (!(delta_hf > 0.0)) fail("delta_hf must be > 0");
  if (!(w_write > 0.0)) fail("w_write must be > 0");
  if (!(w_read > 0.0)) fail("w_read must be > 0");
  if (delta_s == 0.0) fail("delta_s must be nonzero");
  if (delta_a() == 0.0) fail("delta_a = delta_s + delta_hf must be nonzero");
  if (delta_a() + delta_hf == 0.0) fail("delta_a + delta_hf must be nonzero");
}

DerivedCouplings DerivedCouplings::bright(double g) {
  DerivedCouplings c;
  c.g_s = g;
  c.g = g;
  return c;
}

DerivedCouplings derive_couplings(const PhysicalParams& params, double stage_energy) {
  params.validate();
  if (!(stage_energy > 0.0)) {
    throw Error(ErrorCode::BadParams, "stage pulse energy W must be > 0");
  }
  DerivedCouplings c;
  const double root = std::sqrt(params.d * stage_energy);
  c.g_s = root / params.delta_s;
  c.g_a = root / params.delta_a();
  const double gap = c.g_s * c.g_s - c.g_a * c.g_a;
  if (!(gap > 0.0)) {
    throw Error(ErrorCode::CouplingDegenerate,
                "g_s^2 <= g_a^2: bright-mode coupling would be imaginary");
  }
  c.g = std::sqrt(gap);
  c.kappa_s = params.d / params.delta_s;
  c.kappa_a = params.d / (params.delta_a() + params.delta_hf);
  c.delta_k = c.kappa_s + c.kappa_a;
  c.xi = c.g_a / c.g_s;
  c.stark = (1.0 / params.delta_s - 1.0 / params.delta_a()) * stage_energy;
  c.energy = stage_energy;
  return c;
}

// ---------------------------------------------------------------------------

ControlWaveform ControlWaveform::square(const SquareShape& shape, TimeWindow window) {
  check_window(window);
  if (!(shape.duration > 0.0)) {
    throw Error(ErrorCode::BadWaveformParams, "square pulse duration must be > 0");
  }
  if (shape.amplitude < 0.0) {
    throw Error(ErrorCode::BadWaveformParams, "square pulse amplitude must be >= 0");
  }
  const double end = shape.start + shape.duration;
  if (shape.start < window.t0 || end > window.t1) {
    throw Error(ErrorCode::BadWaveformParams, "square pulse extends outside the time window");
  }
  ControlWaveform w;
  w.kind_ = WaveformKind::square;
  w.window_ = window;
  w.square_ = shape;
  w.finish();
  return w;
}

ControlWaveform ControlWaveform::gaussian(const GaussianShape& shape, TimeWindow window) {
  check_window(window);
  if (!(shape.tau > 0.0)) {
    throw Error(ErrorCode::BadWaveformParams, "gaussian pulse duration must be > 0");
  }
  if (shape.amplitude < 0.0) {
    throw Error(ErrorCode::BadWaveformParams, "gaussian pulse amplitude must be >= 0");
  }
  if (!window.contains(shape.center)) {
    throw Error(ErrorCode::BadWaveformParams, "gaussian pulse center outside the time window");
  }
  ControlWaveform w;
  w.kind_ = WaveformKind::gaussian;
  w.window_ = window;
  w.gaussian_ = shape;
  w.finish();
  return w;
}

ControlWaveform ControlWaveform::spline(SplineShape shape, TimeWindow window) {
  check_window(window);
  const auto n = shape.knot_times.size();
  if (n < 2 || shape.knot_amplitudes.size() != n) {
    throw Error(ErrorCode::BadWaveformParams,
                "spline needs >= 2 knots with one amplitude per knot");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!window.contains(shape.knot_times[i])) {
      throw Error(ErrorCode::BadWaveformParams, "spline knot outside the time window");
    }
    if (i > 0 && !(shape.knot_times[i] > shape.knot_times[i - 1])) {
      throw Error(ErrorCode::BadWaveformParams, "spline knot times must increase strictly");
    }
  }
  ControlWaveform w;
  w.kind_ = WaveformKind::spline;
  w.window_ = window;
  for (std::size_t i = 0; i < n; ++i) {
    double& a = shape.knot_amplitudes[i];
    if (!std::isfinite(a)) {
      throw Error(ErrorCode::BadWaveformParams, "spline amplitude is not finite");
    }
    if (a < 0.0) {
      std::ostringstream msg;
      msg << "spline knot " << i << " amplitude " << a << " clamped to 0";
      w.warnings_.push_back(msg.str());
      a = 0.0;
    }
  }
  w.spline_ = std::move(shape);

  const auto& t = w.spline_.knot_times;
  const auto& y = w.spline_.knot_amplitudes;
  RealVector h(n - 1), m(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = t[k + 1] - t[k];
    m[k] = (y[k + 1] - y[k]) / h[k];
  }
  w.slopes_.assign(n, 0.0);
  if (n == 2) {
    w.slopes_[0] = w.slopes_[1] = m[0];
  } else {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (m[k - 1] == 0.0 || m[k] == 0.0 || std::signbit(m[k - 1]) != std::signbit(m[k])) {
        w.slopes_[k] = 0.0;
      } else {
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        w.slopes_[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
      }
    }
    w.slopes_[0] = pchip_edge(h[0], h[1], m[0], m[1]);
    w.slopes_[n - 1] = pchip_edge(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
  }
  w.finish();
  return w;
}

void ControlWaveform::finish() {
  switch (kind_) {
    case WaveformKind::square: {
      const double a = square_.amplitude;
      energy_ = a * a *
                overlap(square_.start, square_.start + square_.duration, window_.t0, window_.t1);
      break;
    }
    case WaveformKind::gaussian: {
      const auto& g = gaussian_;
      energy_ = g.amplitude * g.amplitude * g.tau * std::sqrt(std::numbers::pi) * 0.5 *
                (std::erf((window_.t1 - g.center) / g.tau) -
                 std::erf((window_.t0 - g.center) / g.tau));
      break;
    }
    case WaveformKind::spline: {
      // Squared cubic is degree 6; 5-point Gauss-Legendre per segment is exact.
      energy_ = 0.0;
      const auto& t = spline_.knot_times;
      for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        energy_ += gauss_legendre(
            [this](double x) {
              const double v = (*this)(x);
              return v * v;
            },
            t[k], t[k + 1], 1);
      }
      break;
    }
  }
  if (!(energy_ > 0.0)) {
    throw Error(ErrorCode::ZeroEnergyWaveform, "control waveform has zero energy on its window");
  }
}

double ControlWaveform::operator()(double t) const {
  if (!window_.contains(t)) return 0.0;
  switch (kind_) {
    case WaveformKind::square:
      return (t >= square_.start && t <= square_.start + square_.duration) ? square_.amplitude
                                                                           : 0.0;
    case WaveformKind::gaussian: {
      const double x = (t - gaussian_.center) / gaussian_.tau;
      return gaussian_.amplitude * std::exp(-0.5 * x * x);
    }
    case WaveformKind::spline: {
      const auto& tk = spline_.knot_times;
      const auto& yk = spline_.knot_amplitudes;
      if (t < tk.front() || t > tk.back()) return 0.0;
      auto it = std::upper_bound(tk.begin(), tk.end(), t);
      std::size_t k = static_cast<std::size_t>(std::distance(tk.begin(), it));
      k = std::clamp<std::size_t>(k, 1, tk.size() - 1) - 1;
      const double h = tk[k + 1] - tk[k];
      const double s = (t - tk[k]) / h;
      const double s2 = s * s;
      const double s3 = s2 * s;
      const double v = (2 * s3 - 3 * s2 + 1) * yk[k] + (s3 - 2 * s2 + s) * h * slopes_[k] +
                       (-2 * s3 + 3 * s2) * yk[k + 1] + (s3 - s2) * h * slopes_[k + 1];
      return std::max(0.0, v);
    }
  }
  return 0.0;
}

double ControlWaveform::peak() const {
  switch (kind_) {
    case WaveformKind::square:
      return square_.amplitude;
    case WaveformKind::gaussian:
      return (*this)(std::clamp(gaussian_.center, window_.t0, window_.t1));
    case WaveformKind::spline: {
      double best = 0.0;
      const auto& tk = spline_.knot_times;
      for (std::size_t k = 0; k + 1 < tk.size(); ++k) {
        for (int i = 0; i <= 64; ++i) {
          best = std::max(best, (*this)(tk[k] + (tk[k + 1] - tk[k]) * i / 64.0));
        }
      }
      return best;
    }
  }
  return 0.0;
}

RealVector ControlWaveform::breakpoints() const {
  switch (kind_) {
    case WaveformKind::square:
      return {square_.start, square_.start + square_.duration};
    case WaveformKind::gaussian:
      return {};
    case WaveformKind::spline:
      return spline_.knot_times;
  }
  return {};
}

ControlWaveform ControlWaveform::with_energy(double target) const {
  if (!(target > 0.0)) {
    throw Error(ErrorCode::BadWaveformParams, "target pulse energy must be > 0");
  }
  ControlWaveform out = *this;
  const double scale = std::sqrt(target / energy_);
  out.square_.amplitude *= scale;
  out.gaussian_.amplitude *= scale;
  for (double& a : out.spline_.knot_amplitudes) a *= scale;
  for (double& s : out.slopes_) s *= scale;
  out.energy_ = target;
  return out;
}

ControlWaveform make_waveform(const WaveformSpec& spec, TimeWindow window) {
  switch (spec.kind) {
    case WaveformKind::square:
      return ControlWaveform::square(spec.square, window);
    case WaveformKind::gaussian:
      return ControlWaveform::gaussian(spec.gaussian, window);
    case WaveformKind::spline:
      return ControlWaveform::spline(spec.spline, window);
  }
  throw Error(ErrorCode::BadWaveformParams, "unknown waveform kind");
}

double quadrature_energy(const ControlWaveform& waveform, int panels_per_segment) {
  const auto& win = waveform.window();
  RealVector cuts{win.t0};
  for (double b : waveform.breakpoints()) {
    if (b > win.t0 && b < win.t1) cuts.push_back(b);
  }
  cuts.push_back(win.t1);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    // Gauss nodes are interior, so a jump sitting on a cut is never sampled.
    total += gauss_legendre(
        [&waveform](double t) {
          const double v = waveform(t);
          return v * v;
        },
        cuts[k], cuts[k + 1], panels_per_segment);
  }
  return total;
}

// ---------------------------------------------------------------------------

SignalPulse SignalPulse::gaussian(double center, double fwhm, double peak, TimeWindow window) {
  check_window(window);
  if (!(fwhm > 0.0)) throw Error(ErrorCode::BadParams, "signal fwhm must be > 0");
  SignalPulse s;
  s.kind_ = SignalKind::gaussian;
  s.window_ = window;
  s.center_ = center;
  s.duration_ = fwhm;
  s.amplitude_ = peak;
  s.compute_energy();
  return s;
}

SignalPulse SignalPulse::flat(double start, double duration, double amplitude,
                              TimeWindow window) {
  check_window(window);
  if (!(duration > 0.0)) throw Error(ErrorCode::BadParams, "signal duration must be > 0");
  SignalPulse s;
  s.kind_ = SignalKind::flat;
  s.window_ = window;
  s.start_ = start;
  s.duration_ = duration;
  s.center_ = start + 0.5 * duration;
  s.amplitude_ = amplitude;
  s.compute_energy();
  return s;
}

SignalPulse SignalPulse::sampled(ComplexVector envelope, TimeWindow window) {
  check_window(window);
  if (envelope.size() < 2) throw Error(ErrorCode::BadParams, "sampled signal needs >= 2 samples");
  SignalPulse s;
  s.kind_ = SignalKind::sampled;
  s.window_ = window;
  s.envelope_ = std::move(envelope);
  s.duration_ = window.length();
  s.center_ = 0.5 * (window.t0 + window.t1);
  s.compute_energy();
  return s;
}

void SignalPulse::compute_energy() {
  switch (kind_) {
    case SignalKind::gaussian: {
      const double sigma = duration_ / (2.0 * std::sqrt(std::numbers::ln2));
      energy_ = amplitude_ * amplitude_ * sigma * std::sqrt(std::numbers::pi) * 0.5 *
                (std::erf((window_.t1 - center_) / sigma) -
                 std::erf((window_.t0 - center_) / sigma));
      break;
    }
    case SignalKind::flat:
      energy_ = amplitude_ * amplitude_ *
                overlap(start_, start_ + duration_, window_.t0, window_.t1);
      break;
    case SignalKind::sampled:
      energy_ = ramem::energy(envelope_, window_.length() / double(envelope_.size() - 1));
      break;
  }
  if (!(energy_ > 0.0) || !std::isfinite(energy_)) {
    throw Error(ErrorCode::DegenerateInput, "signal pulse has no energy inside its window");
  }
}

cplx SignalPulse::operator()(double t) const {
  if (!window_.contains(t)) return 0.0;
  switch (kind_) {
    case SignalKind::gaussian: {
      const double x = (t - center_) / duration_;
      return amplitude_ * std::exp(-2.0 * std::numbers::ln2 * x * x);
    }
    case SignalKind::flat:
      return (t >= start_ && t <= start_ + duration_) ? cplx(amplitude_) : cplx(0.0);
    case SignalKind::sampled:
      return interpolate_uniform(envelope_, window_.t0, window_.t1, t);
  }
  return 0.0;
}

SignalPulse SignalPulse::with_energy(double target) const {
  if (!(target > 0.0)) throw Error(ErrorCode::BadParams, "signal energy must be > 0");
  SignalPulse out = *this;
  const double scale = std::sqrt(target / energy_);
  out.amplitude_ *= scale;
  for (auto& v : out.envelope_) v *= scale;
  out.energy_ = target;
  return out;
}

ComplexVector SignalPulse::sample(std::span<const double> t_grid) const {
  ComplexVector out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = (*this)(t_grid[i]);
  return out;
}

}  // namespace ramem
