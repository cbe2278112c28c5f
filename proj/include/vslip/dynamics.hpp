#ifndef VSLIP_DYNAMICS_HPP
#define VSLIP_DYNAMICS_HPP

#include <cmath>

#include "vslip/types.hpp"

// Energies, mass matrices and port-Hamiltonian vector fields of the walker
// in every phase. All functions are pure and templated on the scalar type.

namespace vslip {

constexpr int kMaxState = 2 * kMaxDof;

template <typename Scalar>
using StateVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxState, 1>;
template <typename Scalar>
using FieldMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxState, kMaxInputs>;

/// Below this swing-leg length the knee model is declared degenerate.
constexpr double kKneeMinLength = 0.05;

template <typename Scalar>
Scalar leg_length(const Vec<Scalar>& q, Scalar c) {
  using std::sqrt;
  const Scalar dx = q(0) - c;
  return sqrt(dx * dx + q(1) * q(1));
}

/// Gradient of the hip-to-contact distance with respect to (q1, q2).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> leg_length_gradient(const Vec<Scalar>& q, Scalar c) {
  const Scalar L = leg_length(q, c);
  return Eigen::Matrix<Scalar, 2, 1>((q(0) - c) / L, q(1) / L);
}

/// Distance from the hip to the centre of mass of the rigid swing body.
inline double swing_com_offset(const WalkerParams& params) {
  return params.m_f * params.L0 / (params.m_h + params.m_f);
}

/// Rotational inertia of the rigid swing body about its centre of mass.
inline double swing_com_inertia(const WalkerParams& params) {
  const double d = swing_com_offset(params);
  const double r = params.L0 - d;
  return params.m_h * d * d + params.m_f * r * r;
}

/// S(q) with v = S(q) qdot, v the centre-of-mass and angular velocity.
template <typename Scalar>
Mat<Scalar> swing_jacobian(Scalar q3, const WalkerParams& params) {
  using std::cos;
  using std::sin;
  const Scalar d = Scalar(swing_com_offset(params));
  Mat<Scalar> S = Mat<Scalar>::Identity(3, 3);
  S(0, 2) = d * sin(q3);
  S(1, 2) = -d * cos(q3);
  return S;
}

template <typename Scalar>
Mat<Scalar> swing_jacobian_inverse(Scalar q3, const WalkerParams& params) {
  using std::cos;
  using std::sin;
  const Scalar d = Scalar(swing_com_offset(params));
  Mat<Scalar> S = Mat<Scalar>::Identity(3, 3);
  S(0, 2) = -d * sin(q3);
  S(1, 2) = d * cos(q3);
  return S;
}

/// Jacobian of (q1, q2, q3) -> (q1, q2, q1 - L0 cos q3), used by the swing
/// model phase-transition maps.
template <typename Scalar>
Mat<Scalar> swing_transition_jacobian(Scalar q3, const WalkerParams& params) {
  using std::sin;
  Mat<Scalar> Z = Mat<Scalar>::Zero(3, 3);
  Z(0, 0) = Scalar(1);
  Z(1, 1) = Scalar(1);
  Z(2, 0) = Scalar(1);
  Z(2, 2) = Scalar(params.L0) * sin(q3);
  return Z;
}

/// Swing foot position (s1, s2) of the knee model.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> knee_foot_position(const Vec<Scalar>& q) {
  using std::cos;
  using std::sin;
  return {q(0) - q(3) * cos(q(2)), q(1) - q(3) * sin(q(2))};
}

/// Z = d(q1, q2, s1, s2) / d(q1, q2, q3, q4).
template <typename Scalar>
Mat<Scalar> knee_jacobian(const Vec<Scalar>& q) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(q(2));
  const Scalar s = sin(q(2));
  Mat<Scalar> Z = Mat<Scalar>::Zero(4, 4);
  Z(0, 0) = Scalar(1);
  Z(1, 1) = Scalar(1);
  Z(2, 0) = Scalar(1);
  Z(2, 2) = q(3) * s;
  Z(2, 3) = -c;
  Z(3, 1) = Scalar(1);
  Z(3, 2) = -q(3) * c;
  Z(3, 3) = -s;
  return Z;
}

/// Partial derivative of the knee Jacobian with respect to q3 or q4.
template <typename Scalar>
Mat<Scalar> knee_jacobian_derivative(const Vec<Scalar>& q, int coordinate) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(q(2));
  const Scalar s = sin(q(2));
  Mat<Scalar> dZ = Mat<Scalar>::Zero(4, 4);
  if (coordinate == 2) {
    dZ(2, 2) = q(3) * c;
    dZ(2, 3) = s;
    dZ(3, 2) = q(3) * s;
    dZ(3, 3) = -c;
  } else if (coordinate == 3) {
    dZ(2, 2) = s;
    dZ(3, 2) = -c;
  }
  return dZ;
}

inline Matd knee_base_mass(const WalkerParams& params) {
  Matd M0 = Matd::Zero(4, 4);
  M0.diagonal() << params.m_h, params.m_h, params.m_f, params.m_f;
  return M0;
}

/// Mass matrix in the phase's momentum coordinates: diag(m_h, m_h) in the
/// V-SLIP phases, the constant rigid-body matrix of the swing model, and
/// Z^T M0 Z for the knee model.
template <typename Scalar>
Mat<Scalar> mass_matrix(Phase phase, const Vec<Scalar>& q, const WalkerParams& params) {
  switch (phase) {
    case Phase::DoubleSupport:
    case Phase::SingleSupportVSLIP:
      return Scalar(params.m_h) * Mat<Scalar>::Identity(2, 2);
    case Phase::SingleSupportSwing: {
      Mat<Scalar> M = Mat<Scalar>::Zero(3, 3);
      const Scalar m = Scalar(params.m_h + params.m_f);
      M.diagonal() << m, m, Scalar(swing_com_inertia(params));
      return M;
    }
    case Phase::SingleSupportKnee: {
      if (!(q(3) >= Scalar(kKneeMinLength)))
        throw ModelError("knee model degenerate: swing leg length below 0.05 m");
      const Mat<Scalar> Z = knee_jacobian(q);
      return Z.transpose() * knee_base_mass(params).template cast<Scalar>() * Z;
    }
  }
  throw ModelError("unknown phase");
}

template <typename Scalar>
struct BasicEnergies {
  Scalar K = Scalar(0);
  Scalar V = Scalar(0);
  Scalar H = Scalar(0);
};
using Energies = BasicEnergies<double>;

/// Everything the port-Hamiltonian form provides at one state.
template <typename Scalar>
struct BasicVectorFieldBundle {
  StateVec<Scalar> f;      // drift (qdot, pdot) with u = 0
  FieldMat<Scalar> g;      // input vector fields [0; B] as columns
  Scalar H = Scalar(0);
  Scalar K = Scalar(0);
  Scalar V = Scalar(0);
  InputVec<Scalar> y;      // collocated output B^T dH/dp
  InputMat<Scalar> B;      // input matrix in momentum space
  Mat<Scalar> M;           // mass matrix
  Vec<Scalar> dH_dq;       // at constant p
  Vec<Scalar> dH_dp;
};
using VectorFieldBundle = BasicVectorFieldBundle<double>;

/// Configuration acceleration split into drift and input parts:
/// qddot = drift + input * u.
template <typename Scalar>
struct BasicAccelerationSplit {
  Vec<Scalar> velocity;
  Vec<Scalar> drift;
  InputMat<Scalar> input;
};
using AccelerationSplit = BasicAccelerationSplit<double>;

namespace detail {

template <typename Scalar>
Scalar spring_energy(Scalar k, Scalar L0, Scalar L) {
  const Scalar dl = L0 - L;
  return Scalar(0.5) * k * dl * dl;
}

/// Stance-leg terms shared by all phases: potential gradient contribution
/// and the input column d(phi)/dq with phi = -(L0 - L)^2 / 2.
template <typename Scalar>
void add_leg(const Vec<Scalar>& q, Scalar c, const WalkerParams& params, Vec<Scalar>& dV_dq,
             Scalar& V, Eigen::Matrix<Scalar, 2, 1>& input_column) {
  const Scalar L = leg_length(q, c);
  const Eigen::Matrix<Scalar, 2, 1> dL = leg_length_gradient(q, c);
  const Scalar compression = Scalar(params.L0) - L;
  V += spring_energy(Scalar(params.k0), Scalar(params.L0), L);
  dV_dq.template head<2>() -= Scalar(params.k0) * compression * dL;
  input_column = compression * dL;
}

}  // namespace detail

/// Configuration velocity qdot as a function of (q, p).
template <typename Scalar>
Vec<Scalar> velocity(const BasicHybridState<Scalar>& x, const WalkerParams& params) {
  switch (x.phase) {
    case Phase::DoubleSupport:
    case Phase::SingleSupportVSLIP:
      return x.p / Scalar(params.m_h);
    case Phase::SingleSupportSwing: {
      const Mat<Scalar> M = mass_matrix(x.phase, x.q, params);
      const Vec<Scalar> v = x.p.cwiseQuotient(M.diagonal());
      return swing_jacobian_inverse(x.q(2), params) * v;
    }
    case Phase::SingleSupportKnee:
      return mass_matrix(x.phase, x.q, params).ldlt().solve(x.p);
  }
  throw ModelError("unknown phase");
}

template <typename Scalar>
BasicVectorFieldBundle<Scalar> vector_fields(const BasicHybridState<Scalar>& x,
                                             const WalkerParams& params) {
  using std::cos;
  using std::sin;
  const int n = dof(x.phase);
  if (x.q.size() != n || x.p.size() != n)
    throw ModelError("state dimension does not match phase");
  const int m = input_count(x.phase);
  const Scalar g0 = Scalar(params.g0);

  BasicVectorFieldBundle<Scalar> out;
  out.M = mass_matrix(x.phase, x.q, params);
  out.B = InputMat<Scalar>::Zero(n, m);
  out.dH_dq = Vec<Scalar>::Zero(n);
  Scalar V = Scalar(0);
  Eigen::Matrix<Scalar, 2, 1> column;
  Vec<Scalar> pdot(n);

  switch (x.phase) {
    case Phase::DoubleSupport:
    case Phase::SingleSupportVSLIP: {
      V += Scalar(params.m_h) * g0 * x.q(1);
      out.dH_dq(1) += Scalar(params.m_h) * g0;
      detail::add_leg(x.q, x.c1, params, out.dH_dq, V, column);
      out.B.col(0) = column;
      if (x.phase == Phase::DoubleSupport) {
        detail::add_leg(x.q, x.c2, params, out.dH_dq, V, column);
        out.B.col(1) = column;
      }
      out.dH_dp = x.p / Scalar(params.m_h);
      out.K = Scalar(0.5) * x.p.dot(out.dH_dp);
      pdot = -out.dH_dq;
      break;
    }
    case Phase::SingleSupportSwing: {
      const Scalar mass = Scalar(params.m_h + params.m_f);
      const Scalar d = Scalar(swing_com_offset(params));
      const Scalar s3 = sin(x.q(2));
      const Scalar c3 = cos(x.q(2));
      V += mass * g0 * (x.q(1) - d * s3);
      out.dH_dq(1) += mass * g0;
      out.dH_dq(2) += -mass * g0 * d * c3;
      detail::add_leg(x.q, x.c1, params, out.dH_dq, V, column);
      InputMat<Scalar> Bq = InputMat<Scalar>::Zero(3, 2);
      Bq.col(0).template head<2>() = column;
      Bq(2, 1) = Scalar(1);
      const Mat<Scalar> Sinv = swing_jacobian_inverse(x.q(2), params);
      out.B = Sinv.transpose() * Bq;
      out.dH_dp = x.p.cwiseQuotient(out.M.diagonal());
      out.K = Scalar(0.5) * x.p.dot(out.dH_dp);
      // D = d(S^T p)/dq; only the third row of S^T p depends on q.
      Mat<Scalar> D = Mat<Scalar>::Zero(3, 3);
      D(2, 2) = d * (c3 * x.p(0) + s3 * x.p(1));
      const Mat<Scalar> gyro = Sinv.transpose() * (D.transpose() - D) * Sinv;
      pdot = -Sinv.transpose() * out.dH_dq + gyro * out.dH_dp;
      break;
    }
    case Phase::SingleSupportKnee: {
      const Scalar s3 = sin(x.q(2));
      const Scalar c3 = cos(x.q(2));
      V += Scalar(params.m_h) * g0 * x.q(1) + Scalar(params.m_f) * g0 * (x.q(1) - x.q(3) * s3);
      out.dH_dq(1) += Scalar(params.m_h + params.m_f) * g0;
      out.dH_dq(2) += -Scalar(params.m_f) * g0 * x.q(3) * c3;
      out.dH_dq(3) += -Scalar(params.m_f) * g0 * s3;
      detail::add_leg(x.q, x.c1, params, out.dH_dq, V, column);
      out.B.col(0).template head<2>() = column;
      out.B(2, 1) = Scalar(1);
      out.B(3, 2) = Scalar(1);
      out.dH_dp = out.M.ldlt().solve(x.p);
      out.K = Scalar(0.5) * x.p.dot(out.dH_dp);
      // dK/dq at constant p equals -qdot^T Z^T M0 dZ/dq_k qdot.
      const Mat<Scalar> Z = knee_jacobian(x.q);
      const Vec<Scalar> weighted =
          knee_base_mass(params).template cast<Scalar>() * (Z * out.dH_dp);
      for (int k = 2; k < 4; ++k)
        out.dH_dq(k) -= weighted.dot(knee_jacobian_derivative(x.q, k) * out.dH_dp);
      pdot = -out.dH_dq;
      break;
    }
  }

  out.V = V;
  out.H = out.K + out.V;
  out.y = out.B.transpose() * out.dH_dp;

  out.f.resize(2 * n);
  if (x.phase == Phase::SingleSupportSwing)
    out.f.head(n) = swing_jacobian_inverse(x.q(2), params) * out.dH_dp;
  else
    out.f.head(n) = out.dH_dp;
  out.f.tail(n) = pdot;
  out.g = FieldMat<Scalar>::Zero(2 * n, m);
  out.g.bottomRows(n) = out.B;
  return out;
}

template <typename Scalar>
BasicEnergies<Scalar> energies(const BasicHybridState<Scalar>& x, const WalkerParams& params) {
  const auto bundle = vector_fields(x, params);
  return {bundle.K, bundle.V, bundle.H};
}

/// Closed-loop state derivative f(x) + sum_i g_i(x) u_i.
template <typename Scalar>
StateVec<Scalar> state_derivative(const BasicVectorFieldBundle<Scalar>& bundle,
                                  const InputVec<Scalar>& u) {
  if (u.size() == 0) return bundle.f;
  return bundle.f + bundle.g * u;
}

/// Configuration acceleration, obtained by differentiating qdot = G(q) p
/// along the flow.
template <typename Scalar>
BasicAccelerationSplit<Scalar> acceleration(const BasicHybridState<Scalar>& x,
                                            const WalkerParams& params) {
  using std::cos;
  using std::sin;
  const auto bundle = vector_fields(x, params);
  const int n = dof(x.phase);
  const Vec<Scalar> pdot = bundle.f.tail(n);
  BasicAccelerationSplit<Scalar> out;
  out.velocity = bundle.f.head(n);

  switch (x.phase) {
    case Phase::DoubleSupport:
    case Phase::SingleSupportVSLIP:
      out.drift = pdot / Scalar(params.m_h);
      out.input = bundle.B / Scalar(params.m_h);
      break;
    case Phase::SingleSupportSwing: {
      const Scalar d = Scalar(swing_com_offset(params));
      const Mat<Scalar> Sinv = swing_jacobian_inverse(x.q(2), params);
      const Vec<Scalar> Minv = bundle.M.diagonal().cwiseInverse();
      const Vec<Scalar>& v = bundle.dH_dp;
      Vec<Scalar> dSinv_v = Vec<Scalar>::Zero(3);
      const Scalar q3dot = out.velocity(2);
      dSinv_v(0) = -d * cos(x.q(2)) * q3dot * v(2);
      dSinv_v(1) = -d * sin(x.q(2)) * q3dot * v(2);
      out.drift = dSinv_v + Sinv * Minv.cwiseProduct(pdot);
      out.input = Sinv * Minv.asDiagonal() * bundle.B;
      break;
    }
    case Phase::SingleSupportKnee: {
      const Mat<Scalar> Z = knee_jacobian(x.q);
      const Mat<Scalar> Zdot = knee_jacobian_derivative(x.q, 2) * out.velocity(2) +
                               knee_jacobian_derivative(x.q, 3) * out.velocity(3);
      const Mat<Scalar> M0 = knee_base_mass(params).template cast<Scalar>();
      const Mat<Scalar> Mdot = Zdot.transpose() * M0 * Z + Z.transpose() * M0 * Zdot;
      const auto ldlt = bundle.M.ldlt();
      out.drift = ldlt.solve(Vec<Scalar>(pdot - Mdot * out.velocity));
      out.input = ldlt.solve(bundle.B);
      break;
    }
  }
  return out;
}

}  // namespace vslip

#endif  // VSLIP_DYNAMICS_HPP
