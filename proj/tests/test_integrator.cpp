#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vslip/metrics.hpp"

using namespace vslip;

namespace {

RunResult walk(Model model, int steps, const IntegratorConfig& config = {}) {
  const auto& fx = oracle::cycle_fixture();
  const StiffnessController c = model == Model::Slip
                                    ? StiffnessController::passive(fx.params)
                                    : StiffnessController(model, fx.params, ControlGains{}, fx.reference);
  return run_gait(fx.cycle.state, c, config, steps);
}

}  // namespace

TEST_CASE("ballistic flight is integrated exactly") {
  using V2 = Eigen::Vector2d;
  const double g = 9.81;
  auto rhs = [g](double, const V2& y) { return V2(y(1), -g); };
  IntegratorConfig config;
  config.max_step = 0.05;
  const V2 y = integrate_adaptive(rhs, 0.0, 0.7, V2(1.0, 2.0), config);
  CHECK(y(0) == doctest::Approx(1.0 + 2.0 * 0.7 - 0.5 * g * 0.49).epsilon(1e-14));
  CHECK(y(1) == doctest::Approx(2.0 - g * 0.7).epsilon(1e-14));

  // Dense output reproduces the quadratic inside a step.
  const auto step = dopri5_step(rhs, 0.0, V2(1.0, 2.0), rhs(0.0, V2(1.0, 2.0)), 0.1);
  for (double th : {0.1, 0.37, 0.5, 0.9}) {
    const double t = 0.1 * th;
    CHECK(step.dense(th)(0) == doctest::Approx(1.0 + 2.0 * t - 0.5 * g * t * t).epsilon(1e-14));
  }
}

TEST_CASE("a state just above the touchdown surface fires within one step") {
  const WalkerParams p;
  HybridState x;
  x.phase = Phase::SingleSupportVSLIP;
  x.q = (Vecd(2) << 0.0, p.L0 * std::sin(p.alpha0) + 1e-6).finished();
  x.p = (Vecd(2) << 1.2 * p.m_h, -0.5 * p.m_h).finished();
  x.c1 = -0.3;
  SegmentStart start;
  start.state = x;
  const SegmentResult r = integrate_step(start, StiffnessController::passive(p), IntegratorConfig{});
  REQUIRE(r.event);
  CHECK(r.event->kind == EventKind::Touchdown);
  CHECK(r.event->t == doctest::Approx(2e-6).epsilon(1e-3));
  CHECK(std::abs(touchdown_guard(r.event->pre_state, p).value) < 1e-10);
  CHECK(r.outcome == RunOutcome::Completed);
}

TEST_CASE("passive walker repeats the limit-cycle period") {
  const auto& fx = oracle::cycle_fixture();
  const RunResult r = walk(Model::Slip, 4);
  REQUIRE(r.outcome == RunOutcome::Completed);
  const StepMarks marks = step_marks(r.trace);
  REQUIRE(marks.t.size() == 5);
  for (std::size_t i = 1; i < marks.t.size(); ++i) {
    CHECK(marks.t[i] - marks.t[i - 1] == doctest::Approx(fx.cycle.T).epsilon(1e-8));
    CHECK(marks.q1[i] - marks.q1[i - 1] == doctest::Approx(fx.cycle.stride_length).epsilon(1e-8));
  }
  double drift = 0;
  for (const auto& s : r.trace.samples) drift = std::max(drift, std::abs(s.H - fx.cycle.energy));
  CHECK(drift < 1e-6 * fx.cycle.energy);
  for (const auto& s : r.trace.samples) CHECK(s.power == 0.0);
}

TEST_CASE("trace structure") {
  for (Model model : {Model::VSlip, Model::Swing, Model::Knee}) {
    const RunResult r = walk(model, 6);
    CAPTURE(to_string(model));
    REQUIRE(r.outcome == RunOutcome::Completed);
    CHECK(r.steps == 6);
    const auto& s = r.trace.samples;
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].t > s[i - 1].t);
    // Events alternate and are bracketed by samples of the old and new phase.
    EventKind expected = EventKind::LiftOff;
    for (const auto& e : r.trace.events) {
      CHECK(e.kind == expected);
      expected = expected == EventKind::LiftOff ? EventKind::Touchdown : EventKind::LiftOff;
      auto after = std::upper_bound(s.begin(), s.end(), e.t, [](double t, const TraceSample& x) { return t < x.t; });
      REQUIRE(after != s.begin());
      CHECK(std::prev(after)->state.phase == e.pre_state.phase);
      if (after != s.end()) CHECK(after->state.phase == e.post_state.phase);
      check_state(e.post_state, WalkerParams{});
    }
    for (std::size_t i = 1; i < r.trace.events.size(); ++i) CHECK(r.trace.events[i].t > r.trace.events[i - 1].t);
    // Stiffness stays within its bounds.
    const WalkerParams p;
    for (const auto& x : s)
      for (const auto* u : {&x.u.u1, &x.u.u2})
        if (*u) {
          CHECK(**u + p.k0 >= p.k_min);
          CHECK(**u + p.k0 <= p.k_max);
        }
  }
}

TEST_CASE("energy audit closes for every step") {
  for (Model model : {Model::Slip, Model::VSlip, Model::Swing, Model::Knee}) {
    const RunResult r = walk(model, 8);
    REQUIRE(r.outcome == RunOutcome::Completed);
    const auto audit = energy_audit(r.trace);
    CHECK(audit.size() >= 8);
    double worst = 0;
    for (double a : audit) worst = std::max(worst, std::abs(a));
    CAPTURE(to_string(model));
    CHECK(worst < 1e-5 * oracle::cycle_fixture().cycle.energy);
  }
}

TEST_CASE("tolerance refinement leaves the mean velocity unchanged") {
  IntegratorConfig fine;
  fine.rel_tol = fine.abs_tol = 0.5e-9;
  const WalkerParams p;
  for (Model model : {Model::VSlip, Model::Knee}) {
    const RunResult a = walk(model, 10), b = walk(model, 10, fine);
    REQUIRE(a.outcome == RunOutcome::Completed);
    REQUIRE(b.outcome == RunOutcome::Completed);
    const GaitMetrics ma = gait_metrics(a.trace, model, p), mb = gait_metrics(b.trace, model, p);
    CHECK(std::abs(ma.mean_velocity - mb.mean_velocity) < 1e-4);
  }
}

TEST_CASE("terminal guards end the run with a typed outcome") {
  const WalkerParams p;
  HybridState x;
  x.phase = Phase::SingleSupportVSLIP;
  x.q = (Vecd(2) << 0.0, 0.95).finished();
  x.p = (Vecd(2) << -0.5 * p.m_h, 0.0).finished();
  x.c1 = 0.0;
  RunResult r = run_gait(x, StiffnessController::passive(p), IntegratorConfig{}, 3);
  CHECK(r.outcome == RunOutcome::BackwardMotion);

  x.q << 0.0, 0.05;
  x.p << p.m_h, 0.0;
  r = run_gait(x, StiffnessController::passive(p), IntegratorConfig{}, 3);
  CHECK(r.outcome == RunOutcome::Fall);
  CHECK_THROWS_AS(run_gait(x, StiffnessController::passive(p), IntegratorConfig{}, 0), std::invalid_argument);
}
