#include "vslip/control.hpp"

#include <algorithm>
#include <cmath>

#include "vslip/dynamics.hpp"

namespace vslip {

std::string_view to_string(ControlRegime regime) {
  switch (regime) {
    case ControlRegime::Passive: return "passive";
    case ControlRegime::SingleSupport: return "single-support";
    case ControlRegime::TransitionBand: return "transition-band";
    case ControlRegime::Interior: return "interior";
    case ControlRegime::InteriorFallback: return "interior-fallback";
  }
  return "?";
}

namespace {

LieDerivatives lie_unchecked(const HybridState& x, const ReferenceGait& ref, const SwingTargets& targets,
                             double t, const WalkerParams& params) {
  const AccelerationSplit acc = acceleration(x, params);
  const Vecd& qd = acc.velocity;
  const Vecd& af = acc.drift;
  const ReferencePoint r = ref.at(x.q(0));

  LieDerivatives out;
  out.inputs = static_cast<int>(acc.input.cols());
  out.h1 = r.height - x.q(1);
  out.Lf_h1 = r.height_slope * qd(0) - qd(1);
  out.Lf2_h1 = r.height_curv * qd(0) * qd(0) + r.height_slope * af(0) - af(1);
  out.Lg_Lf_h1 = r.height_slope * acc.input.row(0) - acc.input.row(1);
  out.h2 = r.speed - qd(0);
  out.Lf_h2 = r.speed_slope * qd(0) - af(0);
  out.Lg_h2 = -acc.input.row(0);

  if (x.phase == Phase::SingleSupportSwing || x.phase == Phase::SingleSupportKnee) {
    if (!targets.swing) throw ModelError("single support without a swing reference");
    const Eigen::Vector3d s = targets.swing->at(t);
    out.has_h3 = true;
    out.h3 = s(0) - x.q(2);
    out.Lf_h3 = s(1) - qd(2);
    out.Lf2_h3 = s(2) - af(2);
    out.Lg_Lf_h3 = -acc.input.row(2);
  }
  if (x.phase == Phase::SingleSupportKnee) {
    if (!targets.retraction) throw ModelError("knee single support without a retraction reference");
    const Eigen::Vector3d s = targets.retraction->at(t);
    out.has_h4 = true;
    out.h4 = s(0) - x.q(3);
    out.Lf_h4 = s(1) - qd(3);
    out.Lf2_h4 = s(2) - af(3);
    out.Lg_Lf_h4 = -acc.input.row(3);
  }
  return out;
}

ErrorVector pack(const LieDerivatives& lie) {
  ErrorVector e;
  e.h1 = lie.h1;
  e.dh1 = lie.Lf_h1;
  e.h2 = lie.h2;
  e.dh2 = lie.Lf_h2;
  if (lie.has_h3) {
    e.h3 = lie.h3;
    e.dh3 = lie.Lf_h3;
  }
  if (lie.has_h4) {
    e.h4 = lie.h4;
    e.dh4 = lie.Lf_h4;
  }
  return e;
}

double height_rhs(const LieDerivatives& lie, const ControlGains& k) {
  return lie.Lf2_h1 + k.kappa_d * lie.Lf_h1 + k.kappa_p * lie.h1;
}

double swing_rhs(const LieDerivatives& lie, const ControlGains& k) {
  return lie.Lf2_h3 + k.kappa_w * lie.Lf_h3 + k.kappa_a * lie.h3;
}

double length_rhs(const LieDerivatives& lie, const ControlGains& k) {
  return lie.Lf2_h4 + k.kappa_n * lie.Lf_h4 + k.kappa_l * lie.h4;
}

bool in_transition_band(const HybridState& x, const WalkerParams& params) {
  for (double c : {x.c1, x.c2})
    if (leg_length(x.q, c) >= params.L0 - params.L_e) return true;
  return false;
}

void clamp_inputs(ControlOutput& out, const WalkerParams& params, double torque_limit) {
  auto clamp_one = [&](std::optional<double>& u) {
    if (!u) return;
    const double c = clamp_stiffness_input(*u, params);
    if (c != *u) out.clamped = true;
    u = c;
  };
  clamp_one(out.u.u1);
  clamp_one(out.u.u2);
  for (auto* tau : {&out.u.tau1, &out.u.tau2})
    if (*tau) *tau = std::clamp(**tau, -torque_limit, torque_limit);
}

constexpr double kSingularDeterminant = 1e-12;

}  // namespace

ErrorVector tracking_errors(const HybridState& x, const ReferenceGait& ref, const SwingTargets& targets,
                            double t, const WalkerParams& params) {
  const LieDerivatives lie = lie_unchecked(x, ref, targets, t, params);
  if (!(ref.at(x.q(0)).speed - lie.h2 > 0))
    throw BackwardMotionError("reference lookup requires q1dot > 0");
  return pack(lie);
}

LieDerivatives lie_derivatives(const HybridState& x, const ReferenceGait& ref, const SwingTargets& targets,
                               double t, const WalkerParams& params) {
  return lie_unchecked(x, ref, targets, t, params);
}

double clamp_stiffness_input(double u, const WalkerParams& params) {
  return std::clamp(u, params.k_min - params.k0, params.k_max - params.k0);
}

ControlOutput control_vslip(const HybridState& x, const LieDerivatives& lie, const ControlGains& gains,
                            const WalkerParams& params) {
  ControlOutput out;
  const double v1 = height_rhs(lie, gains);
  if (x.phase == Phase::SingleSupportVSLIP) {
    out.regime = ControlRegime::SingleSupport;
    out.u.u1 = -v1 / lie.Lg_Lf_h1(0);
  } else if (x.phase == Phase::DoubleSupport) {
    const Eigen::Vector2d a = lie.Lg_Lf_h1.head<2>();
    auto band_law = [&] {
      const Eigen::Vector2d u = -a * v1 / a.squaredNorm();
      out.u.u1 = u(0);
      out.u.u2 = u(1);
    };
    if (in_transition_band(x, params)) {
      out.regime = ControlRegime::TransitionBand;
      band_law();
    } else {
      Eigen::Matrix2d A;
      A.row(0) = a.transpose();
      A.row(1) = lie.Lg_h2.head<2>().transpose();
      if (std::abs(A.determinant()) < 1e-8) {
        out.regime = ControlRegime::InteriorFallback;
        band_law();
      } else {
        out.regime = ControlRegime::Interior;
        const Eigen::Vector2d rhs(v1, lie.Lf_h2 + gains.kappa_v * lie.h2);
        const Eigen::Vector2d u = -A.partialPivLu().solve(rhs);
        out.u.u1 = u(0);
        out.u.u2 = u(1);
      }
    }
  } else {
    throw ModelError("V-SLIP law requires a V-SLIP phase");
  }
  clamp_inputs(out, params, std::numeric_limits<double>::infinity());
  return out;
}

ControlOutput control_swing(const HybridState& x, const LieDerivatives& lie, const ControlGains& gains,
                            const WalkerParams& params, double torque_limit) {
  if (x.phase != Phase::SingleSupportSwing) throw ModelError("swing law requires swing single support");
  Eigen::Matrix2d A;
  A.row(0) = lie.Lg_Lf_h1.head<2>().transpose();
  A.row(1) = lie.Lg_Lf_h3.head<2>().transpose();
  if (std::abs(A.determinant()) < kSingularDeterminant) throw ModelError("swing decoupling matrix singular");
  const Eigen::Vector2d rhs(height_rhs(lie, gains), swing_rhs(lie, gains));
  const Eigen::Vector2d u = -A.partialPivLu().solve(rhs);
  ControlOutput out;
  out.regime = ControlRegime::SingleSupport;
  out.u.u1 = u(0);
  out.u.tau1 = u(1);
  clamp_inputs(out, params, torque_limit);
  return out;
}

ControlOutput control_knee(const HybridState& x, const LieDerivatives& lie, const ControlGains& gains,
                           const WalkerParams& params, double torque_limit) {
  if (x.phase != Phase::SingleSupportKnee) throw ModelError("knee law requires knee single support");
  Eigen::Matrix3d A;
  A.row(0) = lie.Lg_Lf_h1.head<3>().transpose();
  A.row(1) = lie.Lg_Lf_h3.head<3>().transpose();
  A.row(2) = lie.Lg_Lf_h4.head<3>().transpose();
  if (std::abs(A.determinant()) < kSingularDeterminant) throw ModelError("knee decoupling matrix singular");
  const Eigen::Vector3d rhs(height_rhs(lie, gains), swing_rhs(lie, gains), length_rhs(lie, gains));
  const Eigen::Vector3d u = -A.partialPivLu().solve(rhs);
  ControlOutput out;
  out.regime = ControlRegime::SingleSupport;
  out.u.u1 = u(0);
  out.u.tau1 = u(1);
  out.u.tau2 = u(2);
  clamp_inputs(out, params, torque_limit);
  return out;
}

StiffnessController::StiffnessController(Model model, WalkerParams params, ControlGains gains,
                                         std::shared_ptr<const ReferenceGait> reference)
    : model_(model), params_(params), gains_(gains), reference_(std::move(reference)) {
  params_.validate();
  gains_.validate();
  if (model_ != Model::Slip && !reference_) throw ModelError("controlled models need a reference gait");
}

StiffnessController StiffnessController::passive(WalkerParams params) {
  return StiffnessController(Model::Slip, params, ControlGains{}, nullptr);
}

SwingTargets StiffnessController::plan_segment(const HybridState& x, double t) const {
  SwingTargets targets;
  if (x.phase == Phase::SingleSupportSwing || x.phase == Phase::SingleSupportKnee) {
    if (!reference_) throw ModelError("swing references need a reference gait");
    targets.swing = make_swing_reference(x.q(2), t, reference_->T_swing, params_.alpha0);
  }
  if (x.phase == Phase::SingleSupportKnee)
    targets.retraction = make_retraction_reference(x.q(3), t, reference_->T_swing, params_);
  return targets;
}

ControlOutput StiffnessController::evaluate(const HybridState& x, double t, const SwingTargets& targets) const {
  if (model_ == Model::Slip) {
    ControlOutput out;
    out.u = ControlInput::zero(x.phase);
    return out;
  }
  const LieDerivatives lie = lie_unchecked(x, *reference_, targets, t, params_);
  switch (x.phase) {
    case Phase::SingleSupportSwing: return control_swing(x, lie, gains_, params_, torque_limit_);
    case Phase::SingleSupportKnee: return control_knee(x, lie, gains_, params_, torque_limit_);
    default: return control_vslip(x, lie, gains_, params_);
  }
}

ErrorVector StiffnessController::errors(const HybridState& x, double t, const SwingTargets& targets) const {
  if (!reference_) return {};
  return pack(lie_unchecked(x, *reference_, targets, t, params_));
}

}  // namespace vslip
