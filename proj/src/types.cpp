#include "vslip/types.hpp"

#include <numbers>

#include "vslip/dynamics.hpp"

namespace vslip {

std::string_view to_string(Model model) {
  switch (model) {
    case Model::Slip: return "slip";
    case Model::VSlip: return "vslip";
    case Model::Swing: return "swing";
    case Model::Knee: return "knee";
  }
  return "?";
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::DoubleSupport: return "DS";
    case Phase::SingleSupportVSLIP: return "SS";
    case Phase::SingleSupportSwing: return "SS-swing";
    case Phase::SingleSupportKnee: return "SS-knee";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  for (Model m : {Model::Slip, Model::VSlip, Model::Swing, Model::Knee})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw ModelError(what);
}
}  // namespace

void WalkerParams::validate() const {
  require(m_h > 0, "m_h must be positive");
  require(m_f >= 0, "m_f must be non-negative");
  require(L0 > 0, "L0 must be positive");
  require(alpha0 > 0 && alpha0 < std::numbers::pi / 2, "alpha0 must lie in (0, pi/2)");
  require(k_min >= 0 && k_min < k0 && k0 < k_max && std::isfinite(k_max),
          "stiffness bounds must satisfy 0 <= k_min < k0 < k_max < inf");
  require(g0 > 0, "g0 must be positive");
  require(L_e > 0 && L_e < 0.5 * L0, "L_e must satisfy 0 < L_e << L0");
  require(delta_retract >= 0 && delta_retract < L0, "delta_retract must lie in [0, L0)");
}

void ControlGains::validate() const {
  for (double k : {kappa_p, kappa_d, kappa_v, kappa_a, kappa_w, kappa_l, kappa_n})
    require(k > 0 && std::isfinite(k), "control gains must be positive");
}

void check_state(const HybridState& x, const WalkerParams& params) {
  const int n = dof(x.phase);
  require(x.q.size() == n && x.p.size() == n, "state dimension does not match phase");
  require(x.q.allFinite() && x.p.allFinite(), "state is not finite");
  require(x.q(1) > 0, "hip below ground");
  if (x.phase == Phase::DoubleSupport) require(x.c1 != x.c2, "double support needs two distinct contacts");
  if (x.phase == Phase::SingleSupportSwing)
    require(x.q(2) >= 0 && x.q(2) < std::numbers::pi, "swing angle outside [0, pi)");
  if (x.phase == Phase::SingleSupportKnee)
    require(x.q(3) > 0 && x.q(3) <= params.L0 * (1 + 1e-9), "swing leg length outside (0, L0]");
}

InputVec<double> ControlInput::as_vector(Phase phase) const {
  InputVec<double> u = InputVec<double>::Zero(input_count(phase));
  switch (phase) {
    case Phase::DoubleSupport:
      u << u1.value_or(0.0), u2.value_or(0.0);
      break;
    case Phase::SingleSupportVSLIP:
      u << u1.value_or(0.0);
      break;
    case Phase::SingleSupportSwing:
      u << u1.value_or(0.0), tau1.value_or(0.0);
      break;
    case Phase::SingleSupportKnee:
      u << u1.value_or(0.0), tau1.value_or(0.0), tau2.value_or(0.0);
      break;
  }
  return u;
}

ControlInput ControlInput::from_vector(Phase phase, const InputVec<double>& u) {
  ControlInput out;
  out.u1 = u(0);
  switch (phase) {
    case Phase::DoubleSupport: out.u2 = u(1); break;
    case Phase::SingleSupportVSLIP: break;
    case Phase::SingleSupportSwing: out.tau1 = u(1); break;
    case Phase::SingleSupportKnee:
      out.tau1 = u(1);
      out.tau2 = u(2);
      break;
  }
  return out;
}

ControlInput ControlInput::zero(Phase phase) {
  return from_vector(phase, InputVec<double>::Zero(input_count(phase)));
}

}  // namespace vslip
