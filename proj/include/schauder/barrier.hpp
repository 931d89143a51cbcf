#pragma once

#include <cstdint>
#include <string>

#include "schauder/gamma.hpp"
#include "schauder/rational.hpp"

namespace schauder {

enum class BarrierKind { lip_phi, existence_w, holder_power };

std::string to_string(BarrierKind kind);
BarrierKind parse_barrier_kind(const std::string& name);

/// Parameters read by the barriers: delta for lip_phi, r for existence_w, alpha for holder_power.
struct BarrierParams {
  Gamma gamma{Rational(0)};
  Rational delta{0};
  Rational r{1};
  Rational alpha{1, 2};
};

/// Normal profile of the barrier at x_n in [0, 1].
///   lip_phi:      x^{2-g-d} + x^{2-g/2} - 3x (g+d < 0), x^{2-g-d} - 2x (0 <= g+d < 1), x log x - x (g+d = 1)
///   existence_w:  2s - s^{2-g/2} - s^{2-g} (g < 0), s - s^{2-g} (0 <= g < 1), -s log x (g = 1), s = x / r
///   holder_power: x^{sigma alpha}
/// Throws DomainError for parameters outside the stated ranges or x_n outside [0, 1].
double barrier(BarrierKind kind, const BarrierParams& params, double xn);

/// (d_t - x_n^gamma D_nn) applied to the barrier profile at x_n in (0, 1].
double barrier_model_image(BarrierKind kind, const BarrierParams& params, double xn);

struct BarrierCheck {
  bool ok = true;
  int samples = 0;
  double worst_margin = 0.0;  ///< smallest sampled margin; positive means the sign holds
  double worst_xn = 0.0;
  std::string expected;
};

/// Samples x_n in (0, 1) and checks the sign the proofs rely on:
///   lip_phi:      image <= -eta x_n^{-delta}
///   existence_w:  image > 0
///   holder_power: image > 0
BarrierCheck check_barrier_sign(BarrierKind kind, const BarrierParams& params, int samples = 256,
                                std::uint64_t seed = 1);

}  // namespace schauder
