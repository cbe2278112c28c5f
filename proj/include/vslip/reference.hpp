#ifndef VSLIP_REFERENCE_HPP
#define VSLIP_REFERENCE_HPP

#include <array>
#include <span>

#include <Eigen/Dense>

#include "vslip/types.hpp"

namespace vslip {

/// Truncated real Fourier series on a periodic axis,
/// a0 + sum_k (a_k cos(k theta) + b_k sin(k theta)),
/// theta = 2 pi (x - origin) / period.
class FourierSeries {
 public:
  FourierSeries() = default;
  /// `coefficients` are laid out as [a0, a1, b1, a2, b2, ...].
  FourierSeries(double origin, double period, Eigen::VectorXd coefficients);

  /// Least-squares fit of samples (x_i, y_i).
  static FourierSeries fit(std::span<const double> x, std::span<const double> y, double origin,
                           double period, int harmonics);

  double operator()(double x) const { return derivative(x, 0); }
  /// d^order/dx^order of the series, order in 0..2.
  double derivative(double x, int order) const;

  int harmonics() const { return static_cast<int>((coefficients_.size() - 1) / 2); }
  double origin() const { return origin_; }
  double period() const { return period_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }

 private:
  double origin_ = 0.0;
  double period_ = 1.0;
  Eigen::VectorXd coefficients_ = Eigen::VectorXd::Zero(1);
};

/// Reference value of the q1-parameterized gait and the derivatives needed
/// by the Lie-derivative chain rule.
struct ReferencePoint {
  double height = 0.0;        // q2*(q1)
  double height_slope = 0.0;  // dq2*/dq1
  double height_curv = 0.0;   // d2q2*/dq1^2
  double speed = 0.0;         // q1dot*(q1)
  double speed_slope = 0.0;   // dq1dot*/dq1
};

/// Hip reference (q2*, q1dot*) parameterized by the horizontal hip position,
/// periodic over one step of the passive limit cycle.
struct ReferenceGait {
  FourierSeries height;
  FourierSeries speed;
  double stride_length = 0.0;
  double T_swing = 0.0;
  double residual_height = 0.0;  // max fit residual on the cycle samples [m]
  double residual_speed = 0.0;   // [m/s]

  ReferencePoint at(double q1) const;
  int harmonics() const { return height.harmonics(); }
};

/// Minimum-jerk swing-leg angle reference q3*(t).
struct SwingReference {
  std::array<double, 6> a{};  // coefficients in (t - t_lo)
  double t_lo = 0.0;
  double T_swing = 0.0;

  /// (position, velocity, acceleration); held at the final value after the
  /// swing time has elapsed.
  Eigen::Vector3d at(double t) const;
};

/// Quadratic swing-leg length reference q4*(t).
struct RetractionReference {
  std::array<double, 3> b{};  // coefficients in (t - t_lo)
  double t_lo = 0.0;
  double T_swing = 0.0;
  double L0 = 1.0;

  Eigen::Vector3d at(double t) const;
};

/// Quintic through (q3_at_lo, 0, 0) at t_lo and (pi - alpha0, 0, 0) at
/// t_lo + T_swing.
SwingReference make_swing_reference(double q3_at_lo, double t_lo, double T_swing, double alpha0);

/// 6x6 boundary-condition matrix of the quintic; exposed for tests.
Eigen::Matrix<double, 6, 6> quintic_boundary_matrix(double T_swing);

/// Quadratic through q4_at_lo, L0 - delta at mid-swing and L0 at the end.
RetractionReference make_retraction_reference(double q4_at_lo, double t_lo, double T_swing,
                                              const WalkerParams& params);

}  // namespace vslip

#endif  // VSLIP_REFERENCE_HPP
