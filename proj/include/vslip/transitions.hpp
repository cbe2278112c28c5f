#ifndef VSLIP_TRANSITIONS_HPP
#define VSLIP_TRANSITIONS_HPP

#include <string_view>

#include "vslip/types.hpp"

namespace vslip {

enum class EventKind {
  Touchdown,
  LiftOff,
  Fall,
  BackwardMotion,
  LeadingLiftOff,  // leading leg reaches rest length in double support
  StanceLiftOff,   // stance leg reaches rest length in single support
};

std::string_view to_string(EventKind kind);

/// Events after which the run cannot continue.
constexpr bool is_terminal(EventKind kind) {
  return kind != EventKind::Touchdown && kind != EventKind::LiftOff;
}

/// Signed guard value. An event fires when an armed guard crosses zero from
/// positive to non-positive.
struct GuardValue {
  double value = 0.0;
  bool armed = true;
};

struct TransitionEvent {
  EventKind kind = EventKind::Touchdown;
  double t = 0.0;
  HybridState pre_state;
  HybridState post_state;
  double energy_dissipated = 0.0;  // foot kinetic energy lost at touchdown
  double energy_change = 0.0;      // H(post) - H(pre)
};

/// Hip height above the touchdown surface of the swing foot. For the swing
/// and knee models the guard is armed once the swing foot is ahead of the
/// hip (q3 > pi/2).
GuardValue touchdown_guard(const HybridState& state, const WalkerParams& params);

/// Trailing-leg lift-off guard L0 - L2 in double support.
GuardValue liftoff_guard(const HybridState& state, const WalkerParams& params);

/// Leading-leg guard L0 - L1 in double support; a crossing is a fault.
GuardValue leading_liftoff_guard(const HybridState& state, const WalkerParams& params);

/// Continuous scalar whose downward zero crossing marks an armed touchdown:
/// max(guard, pi/2 - q3) for the swing and knee models.
double touchdown_event_function(const HybridState& state, const WalkerParams& params);

/// Compliant touchdown: the hip velocity carries over, the new foot is
/// pinned and its kinetic energy is dissipated. The new foot becomes the
/// leading contact c1 and the former stance foot the trailing contact c2.
TransitionEvent apply_touchdown(const HybridState& state, const WalkerParams& params, double t);

/// Trailing-leg lift-off into the single-support phase `target`. The leading
/// foot stays c1; the lifted foot starts with zero horizontal velocity (swing
/// model) or at rest (knee model).
TransitionEvent apply_liftoff(const HybridState& state, const WalkerParams& params, Phase target,
                              double t);

/// World velocity of the swing foot in a single-support state (zero vector
/// for the massless V-SLIP legs).
Eigen::Vector2d swing_foot_velocity(const HybridState& state, const WalkerParams& params);

/// Hip velocity (q1dot, q2dot) in any phase.
Eigen::Vector2d hip_velocity(const HybridState& state, const WalkerParams& params);

}  // namespace vslip

#endif  // VSLIP_TRANSITIONS_HPP
