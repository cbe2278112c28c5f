#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

using namespace vslip;
using oracle::Rng;

namespace {

const Phase kAllPhases[] = {Phase::DoubleSupport, Phase::SingleSupportVSLIP, Phase::SingleSupportSwing,
                            Phase::SingleSupportKnee};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Lagrangian-side mass matrix and input map in configuration coordinates.
Matd config_mass(Phase phase, const Vecd& q, const WalkerParams& p) {
  const Matd M = mass_matrix(phase, q, p);
  if (phase != Phase::SingleSupportSwing) return M;
  const Matd S = swing_jacobian(q(2), p);
  return S.transpose() * M * S;
}

double potential(const HybridState& x, const WalkerParams& p) {
  HybridState s = x;
  s.p.setZero();
  return energies(s, p).V;
}

}  // namespace

TEST_CASE("leg length on simple geometries") {
  Vecd q(2);
  q << 0.0, 1.0;
  CHECK(leg_length(q, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  q << 0.3, 0.4;
  CHECK(leg_length(q, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  const WalkerParams p;
  q << 0.0, p.L0 * std::sin(p.alpha0);
  CHECK(leg_length(q, -p.L0 * std::cos(p.alpha0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q(1) == doctest::Approx(0.8870).epsilon(1e-4));
  CHECK(p.L0 * std::cos(p.alpha0) == doctest::Approx(0.4617).epsilon(1e-4));
}

TEST_CASE("energies at rest") {
  const WalkerParams p;
  HybridState x;
  x.phase = Phase::SingleSupportVSLIP;
  x.q = (Vecd(2) << 0.0, 1.0).finished();
  x.p = Vecd::Zero(2);
  const Energies e = energies(x, p);
  CHECK(e.K == 0.0);
  CHECK(e.V == doctest::Approx(147.15).epsilon(1e-12));

  // Both legs at rest length in the touchdown geometry: gravity only.
  x.phase = Phase::DoubleSupport;
  x.q << 0.0, p.L0 * std::sin(p.alpha0);
  x.c1 = p.L0 * std::cos(p.alpha0);
  x.c2 = -x.c1;
  const Energies ds = energies(x, p);
  CHECK(ds.K == 0.0);
  CHECK(ds.V == doctest::Approx(p.m_h * p.g0 * x.q(1)).epsilon(1e-12));
}

TEST_CASE("mass matrices") {
  const WalkerParams p;
  const Matd ds = mass_matrix(Phase::DoubleSupport, Vecd(Vecd::Zero(2)), p);
  CHECK(ds.isApprox((Matd(2, 2) << 15, 0, 0, 15).finished(), 1e-15));
  CHECK(swing_com_offset(p) == doctest::Approx(1.0 / 7).epsilon(1e-14));
  CHECK(swing_com_inertia(p) == doctest::Approx(15.0 / 7).epsilon(1e-14));
  const Matd sw = mass_matrix(Phase::SingleSupportSwing, Vecd(Vecd::Zero(3)), p);
  CHECK(sw(0, 0) == doctest::Approx(17.5));
  CHECK(sw(1, 1) == doctest::Approx(17.5));
  CHECK(sw(2, 2) == doctest::Approx(15.0 / 7).epsilon(1e-14));

  const Matd S = swing_jacobian(std::numbers::pi / 2, p);
  Matd expected = Matd::Identity(3, 3);
  expected(0, 2) = 1.0 / 7;
  CHECK((S - expected).cwiseAbs().maxCoeff() < 1e-15);

  Vecd q(4);
  q << 0.1, 0.9, 0.2, 0.04;
  CHECK_THROWS_AS(mass_matrix(Phase::SingleSupportKnee, q, p), ModelError);
}

TEST_CASE("knee kinetic energy equals the point-mass energy") {
  const WalkerParams p;
  Rng rng(11);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    Vecd q(4), qd(4);
    q << rng.uniform(-1, 1), rng.uniform(0.5, 1.2), rng.uniform(0, std::numbers::pi), rng.uniform(0.05, 1.0);
    for (int j = 0; j < 4; ++j) qd(j) = rng.uniform(-3, 3);
    const Matd M = mass_matrix(Phase::SingleSupportKnee, q, p);
    worst = std::max(worst, rel_err(0.5 * qd.dot(M * qd), oracle::knee_point_mass_energy(q, qd, p)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("swing kinetic energy equals the point-mass energy") {
  const WalkerParams p;
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    HybridState x = oracle::random_state(Phase::SingleSupportSwing, rng, p);
    const Vecd qd = velocity(x, p);
    CHECK(energies(x, p).K == doctest::Approx(oracle::swing_point_mass_energy(x.q, qd, p)).epsilon(1e-12));
  }
}

TEST_CASE("mass matrices are symmetric positive definite") {
  const WalkerParams p;
  Rng rng(13);
  for (Phase phase : kAllPhases)
    for (int i = 0; i < 200; ++i) {
      const HybridState x = oracle::random_state(phase, rng, p);
      Vecd q = x.q;
      if (phase == Phase::SingleSupportKnee) q(3) = rng.uniform(0.05, 1.0);
      const Matd M = mass_matrix(phase, q, p);
      CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-14);
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff() > 0);
    }
}

TEST_CASE("coordinate-map Jacobians match finite differences") {
  const WalkerParams p;
  Rng rng(14);
  const double d = swing_com_offset(p);
  auto com_map = [&](const Vecd& q) {
    return Eigen::Vector3d(q(0) - d * std::cos(q(2)), q(1) - d * std::sin(q(2)), q(2));
  };
  auto foot_map = [](const Vecd& q) {
    return Eigen::Vector4d(q(0), q(1), q(0) - q(3) * std::cos(q(2)), q(1) - q(3) * std::sin(q(2)));
  };
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    Vecd q(4);
    q << rng.uniform(-1, 1), rng.uniform(0.5, 1), rng.uniform(0.1, 3.0), rng.uniform(0.5, 1);
    const Vecd q3 = q.head(3);
    const Matd S = swing_jacobian(q(2), p);
    const Matd Z = knee_jacobian(q);
    for (int j = 0; j < 3; ++j) {
      Vecd e = Vecd::Zero(3);
      e(j) = h;
      const Eigen::Vector3d col = (com_map(q3 + e) - com_map(q3 - e)) / (2 * h);
      CHECK((col - Eigen::Vector3d(S.col(j))).cwiseAbs().maxCoeff() < 1e-6);
    }
    for (int j = 0; j < 4; ++j) {
      Vecd e = Vecd::Zero(4);
      e(j) = h;
      const Eigen::Vector4d col = (foot_map(q + e) - foot_map(q - e)) / (2 * h);
      CHECK((col - Eigen::Vector4d(Z.col(j))).cwiseAbs().maxCoeff() < 1e-6);
    }
    CHECK((swing_jacobian_inverse(q(2), p) * S - Matd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("port-Hamiltonian power balance dH/dt = <u|y>") {
  const WalkerParams p;
  Rng rng(15);
  for (Phase phase : kAllPhases) {
    double worst = 0;
    for (int i = 0; i < 300; ++i) {
      const HybridState x = oracle::random_state(phase, rng, p);
      const int m = input_count(phase);
      InputVec<double> u(m);
      for (int j = 0; j < m; ++j) u(j) = rng.uniform(-2000, 2000);
      const auto b = vector_fields(x, p);
      const oracle::Field F = [&](const HybridState& s, double) {
        return Eigen::VectorXd(state_derivative(vector_fields(s, p), u));
      };
      const double dH = oracle::directional([&](const HybridState& s, double) { return energies(s, p).H; }, F, x,
                                            0.0, 0.0, 1e-5);
      worst = std::max(worst, rel_err(dH, u.dot(b.y)));
    }
    CAPTURE(to_string(phase));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("Euler-Lagrange residual of the drift and input accelerations") {
  const WalkerParams p;
  Rng rng(16);
  for (Phase phase : {Phase::SingleSupportSwing, Phase::SingleSupportKnee, Phase::DoubleSupport}) {
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      const HybridState x = oracle::random_state(phase, rng, p);
      const int n = dof(phase), m = input_count(phase);
      InputVec<double> u(m);
      for (int j = 0; j < m; ++j) u(j) = rng.uniform(-500, 500);
      const auto b = vector_fields(x, p);
      const AccelerationSplit acc = acceleration(x, p);
      const Vecd qd = acc.velocity;
      const Vecd qdd = acc.drift + acc.input * u;

      // Lagrangian L(q, qd) = qd^T Mq(q) qd / 2 - V(q).
      auto lagrangian = [&](const Vecd& q, const Vecd& v) {
        HybridState s = x;
        s.q = q;
        return 0.5 * v.dot(config_mass(phase, q, p) * v) - potential(s, p);
      };
      const double h = 1e-5;
      Matd Mdot = Matd::Zero(n, n);
      {
        const Matd Mp = config_mass(phase, Vecd(x.q + h * qd), p);
        const Matd Mm = config_mass(phase, Vecd(x.q - h * qd), p);
        Mdot = (Mp - Mm) / (2 * h);
      }
      Vecd dL_dq(n);
      for (int k = 0; k < n; ++k) {
        Vecd e = Vecd::Zero(n);
        e(k) = h;
        dL_dq(k) = (lagrangian(x.q + e, qd) - lagrangian(x.q - e, qd)) / (2 * h);
      }
      // Generalized forces: inputs enter as momentum-space forces B.
      Matd Bq = b.B;
      if (phase == Phase::SingleSupportSwing) Bq = swing_jacobian(x.q(2), p).transpose() * b.B;
      const Vecd residual = config_mass(phase, x.q, p) * qdd + Mdot * qd - dL_dq - Bq * u;
      worst = std::max(worst, residual.cwiseAbs().maxCoeff() / std::max(1.0, (Bq * u).cwiseAbs().maxCoeff()));
    }
    CAPTURE(to_string(phase));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("acceleration is the time derivative of the velocity") {
  const WalkerParams p;
  Rng rng(17);
  for (Phase phase : kAllPhases)
    for (int i = 0; i < 100; ++i) {
      const HybridState x = oracle::random_state(phase, rng, p);
      const AccelerationSplit acc = acceleration(x, p);
      const oracle::Field f = oracle::drift_field(p);
      for (int k = 0; k < dof(phase); ++k) {
        const double fd = oracle::directional(
            [&](const HybridState& s, double) { return velocity(s, p)(k); }, f, x, 0.0, 0.0, 1e-5);
        CHECK(acc.drift(k) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
      }
    }
}

TEST_CASE("collocated output is B^T dH/dp") {
  const WalkerParams p;
  Rng rng(18);
  for (Phase phase : kAllPhases) {
    const HybridState x = oracle::random_state(phase, rng, p);
    const auto b = vector_fields(x, p);
    CHECK((b.y - b.B.transpose() * b.dH_dp).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(b.y.size() == input_count(phase));
  }
}
