#include "vslip/integrator.hpp"

#include <functional>
#include <sstream>

namespace vslip {

std::string_view to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::Completed: return "completed";
    case RunOutcome::Fall: return "fall";
    case RunOutcome::BackwardMotion: return "backward-motion";
    case RunOutcome::LeadingLiftOff: return "leading-liftoff";
    case RunOutcome::StanceLiftOff: return "stance-liftoff";
    case RunOutcome::StepSizeUnderflow: return "step-size-underflow";
    case RunOutcome::NonFinite: return "non-finite";
    case RunOutcome::ModelFault: return "model-fault";
    case RunOutcome::TimeBudget: return "time-budget";
  }
  return "?";
}

void IntegratorConfig::validate() const {
  for (double v : {rel_tol, abs_tol, max_step, event_tol, output_dt})
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("integrator settings must be positive");
}

namespace {

using OdeVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxState + 2, 1>;

constexpr double kFallHeightFraction = 0.1;
constexpr double kMinStep = 1e-13;

struct Guard {
  EventKind kind;
  std::function<double(const HybridState&)> value;
};

std::vector<Guard> guards_for(Phase phase, const WalkerParams& params) {
  std::vector<Guard> out;
  if (phase == Phase::DoubleSupport) {
    out.push_back({EventKind::LiftOff, [&params](const HybridState& x) { return liftoff_guard(x, params).value; }});
    out.push_back({EventKind::LeadingLiftOff,
                   [&params](const HybridState& x) { return leading_liftoff_guard(x, params).value; }});
  } else {
    out.push_back({EventKind::Touchdown,
                   [&params](const HybridState& x) { return touchdown_event_function(x, params); }});
    out.push_back({EventKind::StanceLiftOff,
                   [&params](const HybridState& x) { return params.L0 - leg_length(x.q, x.c1); }});
  }
  out.push_back({EventKind::Fall, [&params](const HybridState& x) {
                   return x.q(1) - kFallHeightFraction * params.L0;
                 }});
  out.push_back({EventKind::BackwardMotion, [&params](const HybridState& x) { return velocity(x, params)(0); }});
  return out;
}

RunOutcome outcome_for(EventKind kind) {
  switch (kind) {
    case EventKind::Fall: return RunOutcome::Fall;
    case EventKind::BackwardMotion: return RunOutcome::BackwardMotion;
    case EventKind::LeadingLiftOff: return RunOutcome::LeadingLiftOff;
    case EventKind::StanceLiftOff: return RunOutcome::StanceLiftOff;
    default: return RunOutcome::Completed;
  }
}

HybridState unpack(const HybridState& tmpl, const OdeVec& y) {
  HybridState x = tmpl;
  const int n = dof(tmpl.phase);
  x.q = y.head(n);
  x.p = y.segment(n, n);
  return x;
}

struct Candidate {
  EventKind kind;
  double theta;  // step fraction at the root (right side of the bracket)
  OdeVec y;
};

}  // namespace

TraceSample make_sample(const HybridState& x, double t, const StiffnessController& controller,
                        const SwingTargets& targets, double work, double abs_work) {
  TraceSample s;
  s.t = t;
  s.state = x;
  const ControlOutput c = controller.evaluate(x, t, targets);
  s.u = c.u;
  s.regime = c.regime;
  s.clamped = c.clamped;
  const VectorFieldBundle b = vector_fields(x, controller.params());
  s.K = b.K;
  s.V = b.V;
  s.H = b.H;
  s.power = c.u.as_vector(x.phase).dot(b.y);
  s.errors = controller.errors(x, t, targets);
  s.work = work;
  s.abs_work = abs_work;
  return s;
}

SegmentResult integrate_step(const SegmentStart& start, const StiffnessController& controller,
                             const IntegratorConfig& config, double time_budget) {
  const WalkerParams& params = controller.params();
  const HybridState& tmpl = start.state;
  const int n = dof(tmpl.phase);
  const auto guards = guards_for(tmpl.phase, params);

  auto rhs = [&](double t, const OdeVec& y) -> OdeVec {
    HybridState x = unpack(tmpl, y);
    x.t_phase = t - start.t;
    const ControlOutput c = controller.evaluate(x, t, start.targets);
    const VectorFieldBundle b = vector_fields(x, params);
    const InputVec<double> u = c.u.as_vector(x.phase);
    OdeVec dy(2 * n + 2);
    dy.head(2 * n) = state_derivative(b, u);
    const double power = u.dot(b.y);
    dy(2 * n) = power;
    dy(2 * n + 1) = std::abs(power);
    return dy;
  };
  auto state_at = [&](double t, const OdeVec& y) {
    HybridState x = unpack(tmpl, y);
    x.t_phase = t - start.t;
    return x;
  };
  auto sample = [&](double t, const OdeVec& y) {
    return make_sample(state_at(t, y), t, controller, start.targets, y(2 * n), y(2 * n + 1));
  };

  SegmentResult out;
  out.last_state = tmpl;
  out.t_end = start.t;
  out.work = start.work;
  out.abs_work = start.abs_work;

  OdeVec y(2 * n + 2);
  y.head(n) = tmpl.q;
  y.segment(n, n) = tmpl.p;
  y(2 * n) = start.work;
  y(2 * n + 1) = start.abs_work;

  try {
    double t = start.t;
    if (start.sample_start) out.trace.samples.push_back(sample(t, y));
    double next_sample = (std::floor(t / config.output_dt) + 1) * config.output_dt;

    std::vector<double> guard_prev;
    for (const auto& g : guards) {
      guard_prev.push_back(g.value(state_at(t, y)));
      if ((g.kind == EventKind::Fall || g.kind == EventKind::BackwardMotion) && !(guard_prev.back() > 0)) {
        TransitionEvent ev;
        ev.kind = g.kind;
        ev.t = t;
        ev.pre_state = ev.post_state = state_at(t, y);
        out.trace.events.push_back(ev);
        out.event = ev;
        out.outcome = outcome_for(g.kind);
        out.diagnostic = std::string("terminal event: ") + std::string(to_string(g.kind));
        return out;
      }
    }

    OdeVec k1 = rhs(t, y);
    double h = std::min(1e-4, config.max_step);
    while (true) {
      if (t - start.t > time_budget) {
        out.outcome = RunOutcome::TimeBudget;
        out.diagnostic = "no transition within the time budget";
        break;
      }
      const auto s = dopri5_step(rhs, t, y, k1, h);
      const double err = dopri5_error_norm(s, config.rel_tol, config.abs_tol);
      if (!std::isfinite(err) || !s.y1.allFinite()) {
        if (h * 0.25 < kMinStep) {
          out.outcome = RunOutcome::NonFinite;
          out.diagnostic = "non-finite state";
          break;
        }
        h *= 0.25;
        continue;
      }
      if (err > 1.0) {
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        if (h < kMinStep) {
          out.outcome = RunOutcome::StepSizeUnderflow;
          out.diagnostic = "step size underflow";
          break;
        }
        continue;
      }

      // Accepted step: look for guard crossings.
      std::vector<double> guard_new;
      std::optional<Candidate> best;
      const HybridState x1 = state_at(t + h, s.y1);
      for (std::size_t j = 0; j < guards.size(); ++j) {
        guard_new.push_back(guards[j].value(x1));
        if (!(guard_prev[j] > 0 && guard_new[j] <= 0)) continue;
        // Bisection on re-integrated sub-steps from the step start.
        double lo = 0, hi = h;
        OdeVec y_hi = s.y1;
        while (hi - lo > config.event_tol) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const OdeVec y_mid = dopri5_step(rhs, t, y, k1, mid).y1;
          if (guards[j].value(state_at(t + mid, y_mid)) > 0) {
            lo = mid;
          } else {
            hi = mid;
            y_hi = y_mid;
          }
        }
        if (guards[j].kind == EventKind::Touchdown &&
            touchdown_guard(state_at(t + hi, y_hi), params).value < -1e-8)
          continue;  // arming crossing with the foot below the touchdown surface
        const Candidate cand{guards[j].kind, hi, y_hi};
        if (!best || cand.theta < best->theta ||
            (cand.theta == best->theta && is_terminal(cand.kind) && !is_terminal(best->kind)))
          best = cand;
      }

      const double t_stop = best ? t + best->theta : t + h;
      while (next_sample < t_stop) {
        out.trace.samples.push_back(sample(next_sample, s.dense((next_sample - t) / h)));
        next_sample += config.output_dt;
      }

      if (best) {
        const double t_ev = t + best->theta;
        const HybridState pre = state_at(t_ev, best->y);
        out.trace.samples.push_back(sample(t_ev, best->y));
        next_sample = (std::floor(t_ev / config.output_dt) + 1) * config.output_dt;
        TransitionEvent ev;
        if (best->kind == EventKind::Touchdown) {
          ev = apply_touchdown(pre, params, t_ev);
        } else if (best->kind == EventKind::LiftOff) {
          ev = apply_liftoff(pre, params, single_support_phase(controller.model()), t_ev);
        } else {
          ev.kind = best->kind;
          ev.t = t_ev;
          ev.pre_state = pre;
          ev.post_state = pre;
          out.outcome = outcome_for(best->kind);
          out.diagnostic = std::string("terminal event: ") + std::string(to_string(best->kind));
        }
        if (!is_terminal(ev.kind)) check_state(ev.post_state, params);
        out.trace.events.push_back(ev);
        out.event = ev;
        out.last_state = pre;
        out.t_end = t_ev;
        out.work = best->y(2 * n);
        out.abs_work = best->y(2 * n + 1);
        return out;
      }

      t += h;
      y = s.y1;
      k1 = s.k[6];
      guard_prev = std::move(guard_new);
      out.last_state = state_at(t, y);
      out.t_end = t;
      out.work = y(2 * n);
      out.abs_work = y(2 * n + 1);
      const double factor = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * factor, config.max_step);
    }
  } catch (const ModelError& e) {
    out.outcome = RunOutcome::ModelFault;
    out.diagnostic = e.what();
  }
  return out;
}

RunResult run_gait(const HybridState& initial, const StiffnessController& controller,
                   const IntegratorConfig& config, int n_steps, double t0) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
  config.validate();
  check_state(initial, controller.params());

  RunResult result;
  SegmentStart start;
  start.state = initial;
  start.t = t0;
  if (initial.phase != Phase::DoubleSupport) start.targets = controller.plan_segment(initial, initial.t_lo);

  while (true) {
    SegmentResult seg = integrate_step(start, controller, config);
    auto& samples = result.trace.samples;
    samples.insert(samples.end(), seg.trace.samples.begin(), seg.trace.samples.end());
    result.trace.events.insert(result.trace.events.end(), seg.trace.events.begin(), seg.trace.events.end());
    result.last_state = seg.last_state;
    if (!seg.event || seg.outcome != RunOutcome::Completed) {
      result.outcome = seg.outcome;
      result.diagnostic = seg.diagnostic;
      if (!seg.event && seg.outcome == RunOutcome::Completed) result.outcome = RunOutcome::TimeBudget;
      return result;
    }
    const TransitionEvent& ev = *seg.event;
    if (ev.kind == EventKind::Touchdown && ++result.steps >= n_steps) {
      result.outcome = RunOutcome::Completed;
      result.last_state = ev.post_state;
      return result;
    }
    start.state = ev.post_state;
    start.t = ev.t;
    start.work = seg.work;
    start.abs_work = seg.abs_work;
    start.sample_start = false;
    start.targets = ev.post_state.phase == Phase::DoubleSupport ? SwingTargets{}
                                                                 : controller.plan_segment(ev.post_state, ev.t);
  }
}

}  // namespace vslip
