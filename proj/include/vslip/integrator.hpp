#ifndef VSLIP_INTEGRATOR_HPP
#define VSLIP_INTEGRATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vslip/control.hpp"
#include "vslip/dynamics.hpp"
#include "vslip/transitions.hpp"

namespace vslip {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  double max_step = 0.01;    // [s]
  double event_tol = 1e-13;  // bisection bracket width [s]
  double output_dt = 1e-3;   // trace sampling interval [s]

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with the 4th-order continuous extension.

namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace dopri

template <typename Vector>
struct DopriStep {
  double t0 = 0;
  double h = 0;
  Vector y0, y1, err;
  std::array<Vector, 7> k;  // k[6] = f(t0 + h, y1)

  /// Continuous extension at t0 + theta * h, theta in [0, 1].
  Vector dense(double theta) const {
    using namespace dopri;
    const Vector r2 = y1 - y0;
    const Vector r3 = h * k[0] - r2;
    const Vector r4 = r2 - h * k[6] - r3;
    const Vector r5 = h * (d1 * k[0] + d3 * k[2] + d4 * k[3] + d5 * k[4] + d6 * k[5] + d7 * k[6]);
    const double s = 1.0 - theta;
    return y0 + theta * (r2 + s * (r3 + theta * (r4 + s * r5)));
  }
};

/// One explicit step of size h. `k1` must equal rhs(t0, y0).
template <typename Vector, typename Rhs>
DopriStep<Vector> dopri5_step(const Rhs& rhs, double t0, const Vector& y0, const Vector& k1, double h) {
  using namespace dopri;
  DopriStep<Vector> s;
  s.t0 = t0;
  s.h = h;
  s.y0 = y0;
  s.k[0] = k1;
  s.k[1] = rhs(t0 + c2 * h, Vector(y0 + h * a21 * k1));
  s.k[2] = rhs(t0 + c3 * h, Vector(y0 + h * (a31 * k1 + a32 * s.k[1])));
  s.k[3] = rhs(t0 + c4 * h, Vector(y0 + h * (a41 * k1 + a42 * s.k[1] + a43 * s.k[2])));
  s.k[4] = rhs(t0 + c5 * h, Vector(y0 + h * (a51 * k1 + a52 * s.k[1] + a53 * s.k[2] + a54 * s.k[3])));
  s.k[5] = rhs(t0 + h,
               Vector(y0 + h * (a61 * k1 + a62 * s.k[1] + a63 * s.k[2] + a64 * s.k[3] + a65 * s.k[4])));
  s.y1 = y0 + h * (a71 * k1 + a73 * s.k[2] + a74 * s.k[3] + a75 * s.k[4] + a76 * s.k[5]);
  s.k[6] = rhs(t0 + h, s.y1);
  s.err = h * (e1 * k1 + e3 * s.k[2] + e4 * s.k[3] + e5 * s.k[4] + e6 * s.k[5] + e7 * s.k[6]);
  return s;
}

/// Scaled RMS error norm of a step.
template <typename Vector>
double dopri5_error_norm(const DopriStep<Vector>& s, double rel_tol, double abs_tol) {
  double sum = 0;
  for (Eigen::Index i = 0; i < s.y1.size(); ++i) {
    const double scale = abs_tol + rel_tol * std::max(std::abs(s.y0(i)), std::abs(s.y1(i)));
    const double r = s.err(i) / scale;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(s.y1.size()));
}

/// Adaptive integration of a smooth ODE from t0 to t1 without events.
template <typename Vector, typename Rhs>
Vector integrate_adaptive(const Rhs& rhs, double t0, double t1, Vector y, const IntegratorConfig& config,
                          double initial_step = 1e-3) {
  double t = t0;
  double h = std::min(initial_step, config.max_step);
  Vector k1 = rhs(t, y);
  while (t < t1) {
    const bool last = t + h >= t1;
    const double step = last ? t1 - t : h;
    const auto s = dopri5_step(rhs, t, y, k1, step);
    const double err = dopri5_error_norm(s, config.rel_tol, config.abs_tol);
    if (err <= 1.0) {
      t = last ? t1 : t + step;
      y = s.y1;
      k1 = s.k[6];
    }
    const double factor = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(step * factor, config.max_step);
  }
  return y;
}

// ---------------------------------------------------------------------------
// Hybrid walker simulation.

struct TraceSample {
  double t = 0;
  HybridState state;
  ControlInput u;
  ControlRegime regime = ControlRegime::Passive;
  bool clamped = false;
  double K = 0, V = 0, H = 0;
  ErrorVector errors;
  double power = 0;     // <u|y>
  double work = 0;      // integral of <u|y> since run start
  double abs_work = 0;  // integral of |<u|y>| since run start
};

struct SimTrace {
  std::vector<TraceSample> samples;
  std::vector<TransitionEvent> events;
};

enum class RunOutcome {
  Completed,
  Fall,
  BackwardMotion,
  LeadingLiftOff,
  StanceLiftOff,
  StepSizeUnderflow,
  NonFinite,
  ModelFault,
  TimeBudget,
};

std::string_view to_string(RunOutcome outcome);

/// Where a phase segment starts. Work integrals carry over between segments.
struct SegmentStart {
  HybridState state;
  double t = 0;
  double work = 0;
  double abs_work = 0;
  SwingTargets targets;
  bool sample_start = true;
};

struct SegmentResult {
  SimTrace trace;  // at most one event
  std::optional<TransitionEvent> event;
  RunOutcome outcome = RunOutcome::Completed;
  std::string diagnostic;
  HybridState last_state;  // last good state (the event pre-state when an event fired)
  double t_end = 0;
  double work = 0;
  double abs_work = 0;
};

/// Integrates one phase of the closed loop until the first guard crossing
/// or until `time_budget` seconds have elapsed. Control is evaluated at
/// every integrator stage. Touchdown and lift-off maps are applied to the
/// returned event.
SegmentResult integrate_step(const SegmentStart& start, const StiffnessController& controller,
                             const IntegratorConfig& config, double time_budget = 10.0);

struct RunResult {
  SimTrace trace;
  RunOutcome outcome = RunOutcome::Completed;
  std::string diagnostic;
  HybridState last_state;
  int steps = 0;  // completed touchdowns
};

/// Chains phase segments for `n_steps` touchdowns or until a terminal event.
RunResult run_gait(const HybridState& initial, const StiffnessController& controller,
                   const IntegratorConfig& config, int n_steps, double t0 = 0.0);

/// Closed-loop sample at a state (inputs, energies, errors, power).
TraceSample make_sample(const HybridState& state, double t, const StiffnessController& controller,
                        const SwingTargets& targets, double work = 0, double abs_work = 0);

}  // namespace vslip

#endif  // VSLIP_INTEGRATOR_HPP
