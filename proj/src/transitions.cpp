#include "vslip/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vslip/dynamics.hpp"

namespace vslip {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Touchdown: return "touchdown";
    case EventKind::LiftOff: return "liftoff";
    case EventKind::Fall: return "fall";
    case EventKind::BackwardMotion: return "backward-motion";
    case EventKind::LeadingLiftOff: return "leading-liftoff";
    case EventKind::StanceLiftOff: return "stance-liftoff";
  }
  return "?";
}

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

void require_single_support(const HybridState& x) {
  if (x.phase == Phase::DoubleSupport) throw ModelError("touchdown requires a single-support state");
}

}  // namespace

Eigen::Vector2d hip_velocity(const HybridState& x, const WalkerParams& params) {
  const Vecd qdot = velocity(x, params);
  return {qdot(0), qdot(1)};
}

Eigen::Vector2d swing_foot_velocity(const HybridState& x, const WalkerParams& params) {
  const Vecd qdot = velocity(x, params);
  switch (x.phase) {
    case Phase::SingleSupportSwing: {
      const double s = std::sin(x.q(2)), c = std::cos(x.q(2));
      return {qdot(0) + params.L0 * s * qdot(2), qdot(1) - params.L0 * c * qdot(2)};
    }
    case Phase::SingleSupportKnee: {
      const Vecd zdot = knee_jacobian(x.q) * qdot;
      return {zdot(2), zdot(3)};
    }
    default:
      return Eigen::Vector2d::Zero();
  }
}

GuardValue touchdown_guard(const HybridState& x, const WalkerParams& params) {
  require_single_support(x);
  switch (x.phase) {
    case Phase::SingleSupportSwing:
      return {x.q(1) - params.L0 * std::sin(x.q(2)), x.q(2) > kHalfPi};
    case Phase::SingleSupportKnee:
      return {x.q(1) - x.q(3) * std::sin(x.q(2)), x.q(2) > kHalfPi};
    default:
      return {x.q(1) - params.L0 * std::sin(params.alpha0), true};
  }
}

double touchdown_event_function(const HybridState& x, const WalkerParams& params) {
  const GuardValue guard = touchdown_guard(x, params);
  if (x.phase == Phase::SingleSupportVSLIP) return guard.value;
  return std::max(guard.value, kHalfPi - x.q(2));
}

GuardValue liftoff_guard(const HybridState& x, const WalkerParams& params) {
  if (x.phase != Phase::DoubleSupport) throw ModelError("lift-off guard requires double support");
  return {params.L0 - leg_length(x.q, x.c2), true};
}

GuardValue leading_liftoff_guard(const HybridState& x, const WalkerParams& params) {
  if (x.phase != Phase::DoubleSupport) throw ModelError("lift-off guard requires double support");
  return {params.L0 - leg_length(x.q, x.c1), true};
}

TransitionEvent apply_touchdown(const HybridState& x, const WalkerParams& params, double t) {
  require_single_support(x);
  TransitionEvent ev;
  ev.kind = EventKind::Touchdown;
  ev.t = t;
  ev.pre_state = x;

  double c_new = 0.0;
  switch (x.phase) {
    case Phase::SingleSupportSwing: c_new = x.q(0) - params.L0 * std::cos(x.q(2)); break;
    case Phase::SingleSupportKnee: c_new = x.q(0) - x.q(3) * std::cos(x.q(2)); break;
    default: c_new = x.q(0) + params.L0 * std::cos(params.alpha0); break;
  }
  if (!(c_new > x.c1)) throw ModelError("backward step: new contact behind stance foot");

  // Hip velocity through the explicit phase Jacobians; the foot row of
  // Z * zdot is discarded because the foot is pinned on impact.
  const Eigen::Vector2d hip_v = hip_velocity(x, params);
  const Eigen::Vector2d foot_v = swing_foot_velocity(x, params);

  HybridState post;
  post.phase = Phase::DoubleSupport;
  post.q = x.q.head(2);
  post.p = params.m_h * Vecd(hip_v);
  post.c1 = c_new;
  post.c2 = x.c1;
  post.t_phase = 0.0;
  post.t_lo = x.t_lo;
  ev.post_state = post;

  ev.energy_dissipated = x.phase == Phase::SingleSupportVSLIP ? 0.0 : 0.5 * params.m_f * foot_v.squaredNorm();
  ev.energy_change = energies(post, params).H - energies(x, params).H;
  return ev;
}

TransitionEvent apply_liftoff(const HybridState& x, const WalkerParams& params, Phase target,
                              double t) {
  if (x.phase != Phase::DoubleSupport) throw ModelError("lift-off requires double support");
  if (target == Phase::DoubleSupport) throw ModelError("lift-off target must be single support");
  TransitionEvent ev;
  ev.kind = EventKind::LiftOff;
  ev.t = t;
  ev.pre_state = x;

  const Eigen::Vector2d hip_v = x.p / params.m_h;
  HybridState post;
  post.phase = target;
  post.c1 = x.c1;
  post.c2 = x.c2;
  post.t_phase = 0.0;
  post.t_lo = t;

  const double dx = x.q(0) - x.c2;
  const double q3 = std::atan2(x.q(1), dx);
  switch (target) {
    case Phase::SingleSupportVSLIP:
      post.q = x.q;
      post.p = x.p;
      break;
    case Phase::SingleSupportSwing: {
      post.q.resize(3);
      post.q << x.q(0), x.q(1), q3;
      const Matd Z = swing_transition_jacobian(q3, params);
      if (std::abs(Z.determinant()) < 1e-12) throw ModelError("singular lift-off map (sin q3 = 0)");
      const Vecd zdot_old = (Vecd(3) << hip_v(0), hip_v(1), 0.0).finished();
      const Vecd zdot_new = Z.partialPivLu().solve(zdot_old);
      post.p = mass_matrix(target, post.q, params) * swing_jacobian(q3, params) * zdot_new;
      break;
    }
    case Phase::SingleSupportKnee: {
      post.q.resize(4);
      post.q << x.q(0), x.q(1), q3, std::hypot(dx, x.q(1));
      const Matd Z = knee_jacobian(post.q);
      if (std::abs(Z.determinant()) < 1e-12) throw ModelError("singular lift-off map (q4 = 0)");
      const Vecd zdot_old = (Vecd(4) << hip_v(0), hip_v(1), 0.0, 0.0).finished();
      const Vecd zdot_new = Z.partialPivLu().solve(zdot_old);
      post.p = mass_matrix(target, post.q, params) * zdot_new;
      break;
    }
    case Phase::DoubleSupport:
      break;
  }
  ev.post_state = post;
  ev.energy_change = energies(post, params).H - energies(x, params).H;
  return ev;
}

}  // namespace vslip
