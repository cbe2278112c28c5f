#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

using namespace vslip;
using oracle::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

// Single-support state with the swing foot on the ground ahead of the hip.
HybridState foot_on_ground(Phase phase, Rng& rng, const WalkerParams& p) {
  HybridState x = oracle::random_state(phase, rng, p);
  const double q3 = rng.uniform(1.75, 2.2);
  x.q(2) = q3;
  const double len = phase == Phase::SingleSupportKnee ? rng.uniform(0.9, 1.0) : p.L0;
  if (phase == Phase::SingleSupportKnee) x.q(3) = len;
  x.q(1) = len * std::sin(q3);
  x.q(0) = x.c1 + rng.uniform(0.05, 0.3);
  Vecd qd(dof(phase));
  for (int i = 0; i < qd.size(); ++i) qd(i) = rng.uniform(-1, 1);
  qd(0) = rng.uniform(0.6, 1.5);
  x.p = oracle::momentum_from_velocity(phase, x.q, qd, p);
  return x;
}

// Same, with the swing foot at rest in the world frame.
HybridState resting_foot(Phase phase, Rng& rng, const WalkerParams& p) {
  HybridState x = foot_on_ground(phase, rng, p);
  const Eigen::Vector2d v(rng.uniform(0.6, 1.5), rng.uniform(-0.5, 0.5));
  Vecd qd(dof(phase));
  const double s = std::sin(x.q(2)), c = std::cos(x.q(2));
  if (phase == Phase::SingleSupportSwing) {
    // Rigid leg: a resting foot leaves only the rotation about it.
    const double q3dot = -rng.uniform(0.6, 1.5);
    qd << -p.L0 * s * q3dot, p.L0 * c * q3dot, q3dot;
  } else {
    // foot = hip - q4 (c, s) stationary: solve for (q3dot, q4dot).
    const Eigen::Matrix2d A = (Eigen::Matrix2d() << x.q(3) * s, -c, -x.q(3) * c, -s).finished();
    const Eigen::Vector2d r = A.inverse() * Eigen::Vector2d(-v);
    qd << v(0), v(1), r(0), r(1);
  }
  x.p = oracle::momentum_from_velocity(phase, x.q, qd, p);
  return x;
}

}  // namespace

TEST_CASE("touchdown guard examples") {
  const WalkerParams p;
  HybridState x;
  x.phase = Phase::SingleSupportVSLIP;
  x.q = (Vecd(2) << 0.0, p.L0 * std::sin(p.alpha0)).finished();
  x.p = Vecd::Zero(2);
  CHECK(std::abs(touchdown_guard(x, p).value) < 1e-15);

  x.phase = Phase::SingleSupportSwing;
  x.q = (Vecd(3) << 0.0, 1.0, kPi / 2).finished();
  x.p = Vecd::Zero(3);
  const GuardValue g = touchdown_guard(x, p);
  CHECK(std::abs(g.value) < 1e-15);
  CHECK_FALSE(g.armed);

  x.phase = Phase::SingleSupportKnee;
  x.q = (Vecd(4) << 0.0, std::sin(0.6109), 0.6109, 1.0).finished();
  x.p = Vecd::Zero(4);
  CHECK(std::abs(touchdown_guard(x, p).value) < 1e-15);
}

TEST_CASE("lift-off guard examples") {
  const WalkerParams p;
  HybridState x;
  x.q = (Vecd(2) << 0.0, 1.0).finished();
  x.c1 = 0.5;
  x.c2 = 0.0;
  CHECK(std::abs(liftoff_guard(x, p).value) < 1e-15);
  x.q << 0.3, 0.4;
  CHECK(liftoff_guard(x, p).value == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("compliant touchdown keeps the hip velocity and dissipates the foot energy") {
  const WalkerParams p;
  Rng rng(21);
  for (Phase phase : {Phase::SingleSupportSwing, Phase::SingleSupportKnee}) {
    for (int i = 0; i < 300; ++i) {
      const HybridState x = foot_on_ground(phase, rng, p);
      const TransitionEvent ev = apply_touchdown(x, p, 0.0);
      const Vecd qd = velocity(x, p);
      const Eigen::Vector2d hip_after = ev.post_state.p / p.m_h;
      CHECK((hip_after - Eigen::Vector2d(qd(0), qd(1))).cwiseAbs().maxCoeff() < 1e-10);

      const double s = std::sin(x.q(2)), c = std::cos(x.q(2));
      const double len = phase == Phase::SingleSupportKnee ? x.q(3) : p.L0;
      const double len_dot = phase == Phase::SingleSupportKnee ? qd(3) : 0.0;
      const Eigen::Vector2d foot_v(qd(0) - len_dot * c + len * s * qd(2), qd(1) - len_dot * s - len * c * qd(2));
      const double kinetic = 0.5 * p.m_f * foot_v.squaredNorm();
      CHECK(ev.energy_dissipated == doctest::Approx(kinetic).epsilon(1e-12));
      CHECK(ev.energy_dissipated >= 0);
      // A retracted knee leg lands compressed and stores spring energy.
      const double spring = 0.5 * p.k0 * (p.L0 - len) * (p.L0 - len);
      const double drop = energies(x, p).H - energies(ev.post_state, p).H;
      CHECK(std::abs(drop + spring - ev.energy_dissipated) < 1e-10);
      CHECK(ev.post_state.c1 == doctest::Approx(x.q(0) - len * c));
      CHECK(ev.post_state.c2 == x.c1);
      check_state(ev.post_state, p);
    }
  }
}

TEST_CASE("massless touchdown conserves H") {
  const WalkerParams p;
  HybridState x;
  x.phase = Phase::SingleSupportVSLIP;
  x.q = (Vecd(2) << 0.1, p.L0 * std::sin(p.alpha0)).finished();
  x.p = (Vecd(2) << 18.0, -4.0).finished();
  const TransitionEvent ev = apply_touchdown(x, p, 0.0);
  CHECK(ev.energy_dissipated == 0.0);
  CHECK(std::abs(ev.energy_change) < 1e-12);
  CHECK(ev.post_state.c1 == doctest::Approx(0.1 + p.L0 * std::cos(p.alpha0)));
}

TEST_CASE("zero momentum maps to zero momentum") {
  const WalkerParams p;
  HybridState x;
  x.phase = Phase::SingleSupportSwing;
  x.q = (Vecd(3) << 0.2, p.L0 * std::sin(2.0), 2.0).finished();
  x.p = Vecd::Zero(3);
  const TransitionEvent td = apply_touchdown(x, p, 0.0);
  CHECK(td.post_state.p.isZero(0));
  CHECK(td.energy_dissipated == 0.0);

  HybridState ds;
  ds.q = (Vecd(2) << 0.2, 0.85).finished();
  ds.p = Vecd::Zero(2);
  ds.c1 = 0.6;
  ds.c2 = -0.25;
  for (Phase target : {Phase::SingleSupportVSLIP, Phase::SingleSupportSwing, Phase::SingleSupportKnee})
    CHECK(apply_liftoff(ds, p, target, 0.0).post_state.p.isZero(0));
}

TEST_CASE("lift-off keeps the hip velocity and starts the foot at rest") {
  const WalkerParams p;
  Rng rng(22);
  for (int i = 0; i < 300; ++i) {
    const HybridState ds = oracle::random_state(Phase::DoubleSupport, rng, p);
    const Eigen::Vector2d v = ds.p / p.m_h;
    for (Phase target : {Phase::SingleSupportVSLIP, Phase::SingleSupportSwing, Phase::SingleSupportKnee}) {
      const TransitionEvent ev = apply_liftoff(ds, p, target, 1.5);
      const HybridState& x = ev.post_state;
      CHECK(x.phase == target);
      CHECK(x.c1 == ds.c1);
      CHECK(x.t_lo == 1.5);
      const Vecd qd = velocity(x, p);
      CHECK(std::abs(qd(0) - v(0)) < 1e-10);
      CHECK(std::abs(qd(1) - v(1)) < 1e-10);
      const double dx = ds.q(0) - ds.c2;
      if (target == Phase::SingleSupportVSLIP) {
        CHECK(x.p == ds.p);
      } else if (target == Phase::SingleSupportSwing) {
        CHECK(x.q(2) == doctest::Approx(std::atan2(ds.q(1), dx)));
        CHECK(std::abs(qd(0) + p.L0 * std::sin(x.q(2)) * qd(2)) < 1e-10);
      } else {
        CHECK(x.q(3) == doctest::Approx(std::hypot(dx, ds.q(1))));
        const double s = std::sin(x.q(2)), c = std::cos(x.q(2));
        const Eigen::Vector2d foot_v(qd(0) - qd(3) * c + x.q(3) * s * qd(2),
                                     qd(1) - qd(3) * s - x.q(3) * c * qd(2));
        CHECK(foot_v.cwiseAbs().maxCoeff() < 1e-10);
        check_state(x, p);
      }
    }
  }
}

TEST_CASE("touchdown then lift-off is the identity on the hip state") {
  const WalkerParams p;
  Rng rng(23);
  for (Phase phase : {Phase::SingleSupportSwing, Phase::SingleSupportKnee}) {
    for (int i = 0; i < 200; ++i) {
      const HybridState x = resting_foot(phase, rng, p);
      const Vecd v0 = velocity(x, p);
      const TransitionEvent td = apply_touchdown(x, p, 0.0);
      CHECK(td.energy_dissipated < 1e-20);
      const TransitionEvent lo = apply_liftoff(td.post_state, p, phase, 0.0);
      const Vecd v1 = velocity(lo.post_state, p);
      CHECK((lo.post_state.q.head(2) - x.q.head(2)).cwiseAbs().maxCoeff() == 0.0);
      CHECK(std::abs(v1(0) - v0(0)) < 1e-10);
      CHECK(std::abs(v1(1) - v0(1)) < 1e-10);
    }
  }
}

TEST_CASE("backward step is a fault") {
  const WalkerParams p;
  HybridState x;
  x.phase = Phase::SingleSupportSwing;
  x.q = (Vecd(3) << 0.0, 0.8, 1.2).finished();  // foot behind the hip
  x.p = Vecd::Zero(3);
  x.c1 = 0.1;
  CHECK_THROWS_AS(apply_touchdown(x, p, 0.0), ModelError);
}
