#include "vslip/limit_cycle.hpp"

#include <cmath>
#include <sstream>

#include "vslip/dynamics.hpp"

namespace vslip {

HybridState section_to_state(const SectionState& s, const WalkerParams& params) {
  HybridState x;
  x.phase = Phase::DoubleSupport;
  x.q = Vecd(2);
  x.q << s.offset, params.L0 * std::sin(params.alpha0);
  x.p = Vecd(2);
  x.p << params.m_h * s.dq1, params.m_h * s.dq2;
  x.c2 = 0.0;
  x.c1 = s.offset + params.L0 * std::cos(params.alpha0);
  return x;
}

StepShot shoot_step(const SectionState& section, const WalkerParams& params, const IntegratorConfig& config) {
  const StiffnessController passive = StiffnessController::passive(params);
  StepShot shot;
  SegmentStart start;
  start.state = section_to_state(section, params);
  check_state(start.state, params);

  for (EventKind expected : {EventKind::LiftOff, EventKind::Touchdown}) {
    SegmentResult seg = integrate_step(start, passive, config, 5.0);
    shot.trace.samples.insert(shot.trace.samples.end(), seg.trace.samples.begin(), seg.trace.samples.end());
    shot.trace.events.insert(shot.trace.events.end(), seg.trace.events.begin(), seg.trace.events.end());
    if (!seg.event || seg.event->kind != expected) {
      std::ostringstream msg;
      msg << "no " << to_string(expected) << " from section (" << section.offset << ", " << section.dq1 << ", "
          << section.dq2 << "): " << (seg.diagnostic.empty() ? std::string(to_string(seg.outcome)) : seg.diagnostic);
      throw GaitFailure(msg.str(), seg.outcome == RunOutcome::Completed ? RunOutcome::TimeBudget : seg.outcome);
    }
    if (expected == EventKind::LiftOff) shot.T_ds = seg.t_end - start.t;
    else shot.T_ss = seg.t_end - start.t;
    start.state = seg.event->post_state;
    start.t = seg.t_end;
    start.sample_start = false;
  }
  shot.end_state = start.state;
  shot.T = start.t;
  shot.step_length = shot.end_state.q(0) - section.offset;
  const Vecd qd = velocity(shot.end_state, params);
  shot.next = {shot.end_state.q(0) - shot.end_state.c2, qd(0), qd(1)};
  return shot;
}

namespace {

Eigen::Vector3d residual_of(const SectionState& s, const StepShot& shot, const std::optional<double>& v_target) {
  const Eigen::Vector3d d = shot.next.as_vector() - s.as_vector();
  if (!v_target) return d;
  return {d(0), shot.step_length / shot.T - *v_target, d(2)};
}

double poincare_residual(const SectionState& s, const StepShot& shot) {
  return (shot.next.as_vector() - s.as_vector()).norm();
}

}  // namespace

LimitCycle find_limit_cycle(const WalkerParams& params, const SectionState& guess, const LimitCycleOptions& opt) {
  params.validate();
  opt.integrator.validate();
  SectionState z = guess;
  StepShot shot = shoot_step(z, params, opt.integrator);
  Eigen::Vector3d r = residual_of(z, shot, opt.target_velocity);
  double res = poincare_residual(z, shot);

  int iter = 0;
  auto done = [&] { return res < opt.goal && (!opt.target_velocity || std::abs(r(1)) < opt.goal); };
  for (; iter < opt.max_iterations && !done(); ++iter) {
    Eigen::Matrix3d J;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(i) = opt.fd_step;
      const SectionState zp = SectionState::from_vector(z.as_vector() + e);
      const SectionState zm = SectionState::from_vector(z.as_vector() - e);
      J.col(i) = (residual_of(zp, shoot_step(zp, params, opt.integrator), opt.target_velocity) -
                  residual_of(zm, shoot_step(zm, params, opt.integrator), opt.target_velocity)) /
                 (2 * opt.fd_step);
    }
    Eigen::Vector3d step;
    if (opt.target_velocity) {
      step = -J.fullPivLu().solve(r);
    } else {
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
      svd.setThreshold(1e-6);
      step = -svd.solve(r);
    }

    // Backtrack while the shot fails or the residual grows.
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 20 && !accepted; ++k, lambda *= 0.5) {
      const SectionState trial = SectionState::from_vector(z.as_vector() + lambda * step);
      try {
        StepShot s = shoot_step(trial, params, opt.integrator);
        const Eigen::Vector3d rt = residual_of(trial, s, opt.target_velocity);
        if (rt.norm() < r.norm() || k == 19) {
          z = trial;
          shot = std::move(s);
          r = rt;
          res = poincare_residual(z, shot);
          accepted = true;
        }
      } catch (const GaitFailure&) {
      }
    }
    if (!accepted || lambda * step.norm() < 1e-15) break;
  }

  if (!(res < opt.tolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "limit cycle search did not converge after " << iter << " iterations (residual " << res << ")";
    throw NonConvergence(msg.str(), z, res);
  }

  LimitCycle c;
  c.params = params;
  c.section = z;
  c.state = section_to_state(z, params);
  c.T = shot.T;
  c.T_ds = shot.T_ds;
  c.T_ss = shot.T_ss;
  c.stride_length = shot.step_length;
  c.energy = energies(c.state, params).H;
  c.mean_velocity = shot.step_length / shot.T;
  c.residual = res;
  c.iterations = iter;
  c.trace = std::move(shot.trace);
  return c;
}

namespace {

struct FitSamples {
  std::vector<double> q1, q2, dq1;
};

FitSamples fit_samples(const LimitCycle& cycle, const WalkerParams& params) {
  FitSamples s;
  for (const auto& sample : cycle.trace.samples) {
    s.q1.push_back(sample.state.q(0));
    s.q2.push_back(sample.state.q(1));
    s.dq1.push_back(velocity(sample.state, params)(0));
  }
  return s;
}

double max_residual(const FourierSeries& f, const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(f(x[i]) - y[i]));
  return m;
}

ReferenceGait fit_unchecked(const LimitCycle& cycle, int harmonics) {
  const FitSamples s = fit_samples(cycle, cycle.params);
  ReferenceGait ref;
  const double origin = cycle.section.offset;
  ref.height = FourierSeries::fit(s.q1, s.q2, origin, cycle.stride_length, harmonics);
  ref.speed = FourierSeries::fit(s.q1, s.dq1, origin, cycle.stride_length, harmonics);
  ref.stride_length = cycle.stride_length;
  ref.T_swing = cycle.T_ss;
  ref.residual_height = max_residual(ref.height, s.q1, s.q2);
  ref.residual_speed = max_residual(ref.speed, s.q1, s.dq1);
  return ref;
}

}  // namespace

int required_harmonics(const LimitCycle& cycle, double tolerance, int max_harmonics) {
  for (int n = 0; n <= max_harmonics; ++n) {
    const ReferenceGait ref = fit_unchecked(cycle, n);
    if (ref.residual_height < tolerance && ref.residual_speed < tolerance) return n;
  }
  return -1;
}

ReferenceGait fit_reference(const LimitCycle& cycle, int harmonics, double tolerance) {
  if (cycle.trace.samples.size() < 2 || !(cycle.stride_length > 0))
    throw std::invalid_argument("limit cycle has no samples");
  ReferenceGait ref = fit_unchecked(cycle, harmonics);
  if (!(ref.residual_height < tolerance && ref.residual_speed < tolerance)) {
    const int need = required_harmonics(cycle, tolerance);
    std::ostringstream msg;
    msg << "fit with " << harmonics << " harmonics leaves residual " << std::max(ref.residual_height, ref.residual_speed)
        << "; " << (need < 0 ? std::string("no harmonic count up to 40 suffices") : std::to_string(need) + " harmonics required");
    throw FitError(msg.str(), need);
  }
  const double x0 = cycle.section.offset;
  for (int i = 0; i <= 1000; ++i)
    if (!(ref.speed(x0 + cycle.stride_length * i / 1000.0) > 0))
      throw FitError("fitted forward speed is not positive over the step", -1);
  return ref;
}

}  // namespace vslip
