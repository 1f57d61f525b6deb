#pragma once

#include <cstddef>
#include <span>

#include "ramem/model.hpp"
#include "ramem/types.hpp"

namespace ramem {

enum class Mode { full_fwm, ideal_bright };
enum class Direction { forward, backward };

struct GridSpec {
  std::size_t n_z = 512;
  std::size_t n_p = 512;
};

inline constexpr std::size_t kMinGridPoints = 32;
/// Any |field| above this is reported as NonFiniteField.
inline constexpr double kBlowUpThreshold = 1e12;

/// Fields of one stage on the uniform (z, p) grid of [0,1]^2.
///
/// Full mode integrates
///   dz a_s = -g_s s,  dz a_a = -g_a s e^{-i dk z},
///   dp s   = g_s a_s - g_a a_a e^{i dk z};
/// ideal mode integrates the bright-mode pair dz b = -g s, dp s = g b and
/// stores b in both a_s and b.
struct FieldEvolution {
  RealVector z_grid;
  RealVector p_grid;
  ComplexGrid a_s;
  ComplexGrid a_a_dag;
  ComplexGrid s;
  ComplexGrid b;
  ComplexVector signal_out;       // a_s(z=1, p)
  ComplexVector anti_stokes_out;  // a_a^dagger(z=1, p)
  DerivedCouplings couplings;
  Mode mode = Mode::ideal_bright;
};

/// Heun (trapezoidal predictor-corrector) marching in p; at every p-level the
/// light fields are recovered from s by cumulative trapezoid in z. Second
/// order in both directions, no step-size restriction.
///
/// Errors: GridTooCoarse (< 32 points), GridMismatch (input lengths),
/// ModeMismatch (anti-Stokes input in ideal mode), NonFiniteField.
FieldEvolution solve_normalized(const DerivedCouplings& couplings, std::span<const cplx> a_s_in,
                                std::span<const cplx> a_a_in, std::span<const cplx> s_in,
                                GridSpec grid, Mode mode);

struct WriteResult {
  ComplexVector s_w;              // s(z, p=1)
  ComplexVector leakage_field;    // a_s(1, p) (b(1, p) in ideal mode)
  ComplexVector anti_stokes_out;  // a_a^dagger(1, p), zero in ideal mode
  double n_in = 0.0;
  double eta_w = 0.0;
  double leak = 0.0;
  double n_a = 0.0;
  FieldEvolution fields;
};

/// Vacuum anti-Stokes input, empty spinwave, signal a_s_in(p).
/// eta_w = int|s_w|^2 dz / int|a_in|^2 dp; leak = int|a_s(1,p)|^2 dp / same.
WriteResult write_stage(const DerivedCouplings& couplings, std::span<const cplx> a_s_in,
                        GridSpec grid, Mode mode);

struct ReadResult {
  ComplexVector b_out;            // retrieved signal at z=1
  ComplexVector s_l;              // residual spinwave s(z, p=1)
  ComplexVector anti_stokes_out;  // a_a^dagger(1, p), zero in ideal mode
  double n_stored = 0.0;
  double eta_r = 0.0;
  double residual = 0.0;
  double n_a = 0.0;
  FieldEvolution fields;
};

/// Retrieval with no optical input. Backward retrieval reflects the stored
/// spinwave z -> 1 - z and then runs the forward equations with the same
/// |delta_k|.
ReadResult read_stage(const DerivedCouplings& couplings, std::span<const cplx> s_init,
                      GridSpec grid, Mode mode, Direction direction);

struct MemoryResult {
  double eta_w = 0.0;
  double eta_r = 0.0;
  double eta_total = 0.0;  // (n_r - n_a) / n_in
  double epsilon = 0.0;    // n_a / n_r
  double n_in = 0.0;
  double n_r = 0.0;
  double n_a = 0.0;             // anti-Stokes energy entering eta (zero in ideal mode)
  double n_a_estimate = 0.0;    // first-order FWM estimate from the spinwave
  double mu1 = 0.0;             // n_a / eta_total
  DerivedCouplings write_couplings;
  DerivedCouplings read_couplings;
  Mode mode = Mode::ideal_bright;
  Direction direction = Direction::backward;
  WriteResult write;
  ReadResult read;
};

/// Write, lossless storage, read, all in the normalized frame. `n_in` is the
/// raw input energy; pass int|a_in|^2 dp when the input was built directly in
/// the normalized frame. In full mode n_a sums the anti-Stokes output of both
/// stages; in ideal mode n_a is zero and the FWM estimate goes to
/// n_a_estimate.
MemoryResult memory_from_normalized(const DerivedCouplings& write_couplings,
                                    const DerivedCouplings& read_couplings,
                                    std::span<const cplx> a_in, double n_in, GridSpec grid,
                                    Mode mode, Direction direction);

/// End-to-end memory run from a raw-frame signal. Only the waveform shapes are
/// taken from the arguments: each is rescaled to the energy given in params
/// (w_write / w_read), which fixes the couplings of the two stages.
MemoryResult full_memory(const PhysicalParams& params, const ControlWaveform& write_waveform,
                         const ControlWaveform& read_waveform, const SignalPulse& signal,
                         GridSpec grid, Mode mode, Direction direction);

/// Raw (z, t) frame solution; n_p of GridSpec is the number of t samples on
/// the waveform window.
struct RawFieldEvolution {
  RealVector z_grid;
  RealVector t_grid;
  ComplexGrid e_s;
  ComplexGrid e_a_dag;
  ComplexGrid spin;
};

/// Integrates the co-moving frame equations including the propagation phases
/// -i (d/delta_s) E_s, +i d/(delta_a + delta_hf) E_a and the AC-Stark term
/// -i (1/delta_s - 1/delta_a) |Omega|^2 S. The phases are taken out with
/// integrating factors; the remainder uses the same Heun/trapezoid scheme as
/// solve_normalized.
RawFieldEvolution solve_raw(const PhysicalParams& params, const ControlWaveform& waveform,
                            std::span<const cplx> e_s_in, GridSpec grid);

struct FrameComparison {
  double spinwave = 0.0;
  double signal = 0.0;
  double anti_stokes = 0.0;

  double worst() const noexcept;
};

/// Solves the write stage once in the raw frame and once in the normalized
/// frame and reports relative L2 differences of the transformed raw fields
/// against the normalized ones, in the flux measure dz dp.
FrameComparison compare_frames(const PhysicalParams& params, const ControlWaveform& waveform,
                               const SignalPulse& signal, GridSpec grid);

}  // namespace ramem
