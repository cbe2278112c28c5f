#ifndef VSLIP_CONTROL_HPP
#define VSLIP_CONTROL_HPP

#include <limits>
#include <memory>
#include <optional>

#include "vslip/reference.hpp"
#include "vslip/types.hpp"

namespace vslip {

/// Raised when the q1-parameterized reference is queried with q1dot <= 0.
class BackwardMotionError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Swing-leg references active during one single-support segment.
struct SwingTargets {
  std::optional<SwingReference> swing;
  std::optional<RetractionReference> retraction;
};

/// Output errors and their first derivatives along the drift. h3 and h4 are
/// identically zero whenever the phase does not carry q3 / q4.
struct ErrorVector {
  double h1 = 0, h2 = 0, h3 = 0, h4 = 0;
  double dh1 = 0, dh2 = 0, dh3 = 0, dh4 = 0;
};

/// Lie derivatives of the error functions along the drift f and the input
/// fields g_i. Time-varying swing references contribute their explicit time
/// derivatives, i.e. derivatives are taken along (f, d/dt).
struct LieDerivatives {
  int inputs = 0;
  double h1 = 0, Lf_h1 = 0, Lf2_h1 = 0;
  InputVec<double> Lg_Lf_h1;
  double h2 = 0, Lf_h2 = 0;
  InputVec<double> Lg_h2;
  bool has_h3 = false;
  double h3 = 0, Lf_h3 = 0, Lf2_h3 = 0;
  InputVec<double> Lg_Lf_h3;
  bool has_h4 = false;
  double h4 = 0, Lf_h4 = 0, Lf2_h4 = 0;
  InputVec<double> Lg_Lf_h4;
};

ErrorVector tracking_errors(const HybridState& state, const ReferenceGait& ref,
                            const SwingTargets& targets, double t, const WalkerParams& params);

LieDerivatives lie_derivatives(const HybridState& state, const ReferenceGait& ref,
                               const SwingTargets& targets, double t, const WalkerParams& params);

enum class ControlRegime {
  Passive,
  SingleSupport,     // single-support decoupling law
  TransitionBand,    // pseudo-inverse law near a rest-length crossing
  Interior,          // full double-support decoupling law
  InteriorFallback,  // interior region with an ill-conditioned decoupling matrix
};

std::string_view to_string(ControlRegime regime);

struct ControlOutput {
  ControlInput u;
  ControlRegime regime = ControlRegime::Passive;
  bool clamped = false;
};

/// Clamps u to the stiffness bounds k_min <= k0 + u <= k_max.
double clamp_stiffness_input(double u, const WalkerParams& params);

/// V-SLIP law for single support and both double-support regions.
ControlOutput control_vslip(const HybridState& state, const LieDerivatives& lie,
                            const ControlGains& gains, const WalkerParams& params);

/// Single-support law of the swing model: (u1, tau).
ControlOutput control_swing(const HybridState& state, const LieDerivatives& lie,
                            const ControlGains& gains, const WalkerParams& params,
                            double torque_limit = std::numeric_limits<double>::infinity());

/// Single-support law of the knee model: (u1, tau1, tau2).
ControlOutput control_knee(const HybridState& state, const LieDerivatives& lie,
                           const ControlGains& gains, const WalkerParams& params,
                           double torque_limit = std::numeric_limits<double>::infinity());

/// Full closed-loop controller for one model family. Immutable and
/// shareable; per-segment swing references are produced by plan_segment.
class StiffnessController {
 public:
  StiffnessController(Model model, WalkerParams params, ControlGains gains,
                      std::shared_ptr<const ReferenceGait> reference);

  /// Zero-input controller for the passive SLIP.
  static StiffnessController passive(WalkerParams params);

  Model model() const { return model_; }
  const WalkerParams& params() const { return params_; }
  const ControlGains& gains() const { return gains_; }
  const ReferenceGait* reference() const { return reference_.get(); }

  void set_torque_limit(double limit) { torque_limit_ = limit; }

  /// Swing references for a single-support segment starting at time t.
  SwingTargets plan_segment(const HybridState& state, double t) const;

  ControlOutput evaluate(const HybridState& state, double t, const SwingTargets& targets) const;

  /// Tracking errors at a state; zero for the passive controller.
  ErrorVector errors(const HybridState& state, double t, const SwingTargets& targets) const;

 private:
  Model model_;
  WalkerParams params_;
  ControlGains gains_;
  std::shared_ptr<const ReferenceGait> reference_;
  double torque_limit_ = std::numeric_limits<double>::infinity();
};

}  // namespace vslip

#endif  // VSLIP_CONTROL_HPP
