#include "vslip/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vslip {

FourierSeries::FourierSeries(double origin, double period, Eigen::VectorXd coefficients)
    : origin_(origin), period_(period), coefficients_(std::move(coefficients)) {
  if (!(period_ > 0)) throw std::invalid_argument("Fourier period must be positive");
  if (coefficients_.size() % 2 != 1) throw std::invalid_argument("Fourier coefficients must be odd in count");
}

FourierSeries FourierSeries::fit(std::span<const double> x, std::span<const double> y, double origin,
                                 double period, int harmonics) {
  if (x.size() != y.size()) throw std::invalid_argument("sample size mismatch");
  if (harmonics < 0) throw std::invalid_argument("harmonics must be non-negative");
  const int cols = 2 * harmonics + 1;
  if (static_cast<int>(x.size()) < cols) throw std::invalid_argument("too few samples for the requested harmonics");
  const double w = 2 * std::numbers::pi / period;
  Eigen::MatrixXd A(x.size(), cols);
  Eigen::VectorXd rhs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double theta = w * (x[i] - origin);
    A(i, 0) = 1.0;
    for (int k = 1; k <= harmonics; ++k) {
      A(i, 2 * k - 1) = std::cos(k * theta);
      A(i, 2 * k) = std::sin(k * theta);
    }
    rhs(i) = y[i];
  }
  return FourierSeries(origin, period, A.colPivHouseholderQr().solve(rhs));
}

double FourierSeries::derivative(double x, int order) const {
  const double w = 2 * std::numbers::pi / period_;
  const double theta = w * (x - origin_);
  double sum = order == 0 ? coefficients_(0) : 0.0;
  for (int k = 1; k <= harmonics(); ++k) {
    const double a = coefficients_(2 * k - 1), b = coefficients_(2 * k);
    const double c = std::cos(k * theta), s = std::sin(k * theta);
    const double kw = k * w;
    switch (order) {
      case 0: sum += a * c + b * s; break;
      case 1: sum += kw * (-a * s + b * c); break;
      case 2: sum += -kw * kw * (a * c + b * s); break;
      default: throw std::invalid_argument("derivative order must be 0, 1 or 2");
    }
  }
  return sum;
}

ReferencePoint ReferenceGait::at(double q1) const {
  return {height(q1), height.derivative(q1, 1), height.derivative(q1, 2), speed(q1),
          speed.derivative(q1, 1)};
}

Eigen::Vector3d SwingReference::at(double t) const {
  const double tau = std::min(std::max(t - t_lo, 0.0), T_swing);
  double pos = 0, vel = 0, acc = 0;
  for (int i = 5; i >= 0; --i) pos = pos * tau + a[i];
  for (int i = 5; i >= 1; --i) vel = vel * tau + i * a[i];
  for (int i = 5; i >= 2; --i) acc = acc * tau + i * (i - 1) * a[i];
  if (t - t_lo >= T_swing) return {pos, 0.0, 0.0};
  return {pos, vel, acc};
}

Eigen::Vector3d RetractionReference::at(double t) const {
  const double tau = t - t_lo;
  if (tau >= T_swing) return {L0, 0.0, 0.0};
  const double s = std::max(tau, 0.0);
  return {b[0] + b[1] * s + b[2] * s * s, b[1] + 2 * b[2] * s, 2 * b[2]};
}

Eigen::Matrix<double, 6, 6> quintic_boundary_matrix(double T) {
  Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
  // rows: position, velocity, acceleration at 0, then at T
  A(0, 0) = 1;
  A(1, 1) = 1;
  A(2, 2) = 2;
  for (int i = 0; i < 6; ++i) {
    A(3, i) = std::pow(T, i);
    if (i >= 1) A(4, i) = i * std::pow(T, i - 1);
    if (i >= 2) A(5, i) = i * (i - 1) * std::pow(T, i - 2);
  }
  return A;
}

SwingReference make_swing_reference(double q3_at_lo, double t_lo, double T_swing, double alpha0) {
  if (!(T_swing > 0)) throw std::invalid_argument("swing time must be positive");
  // The start conditions fix a0..a2; the end conditions fix the rest.
  const Eigen::Matrix<double, 6, 6> A = quintic_boundary_matrix(T_swing);
  const Eigen::Vector3d end(std::numbers::pi - alpha0 - q3_at_lo, 0, 0);
  const Eigen::Vector3d high = A.block<3, 3>(3, 3).fullPivLu().solve(end);
  SwingReference ref;
  ref.a = {q3_at_lo, 0.0, 0.0, high(0), high(1), high(2)};
  ref.t_lo = t_lo;
  ref.T_swing = T_swing;
  return ref;
}

RetractionReference make_retraction_reference(double q4_at_lo, double t_lo, double T_swing,
                                              const WalkerParams& params) {
  if (!(T_swing > 0)) throw std::invalid_argument("swing time must be positive");
  if (q4_at_lo > params.L0 * (1 + 1e-9)) throw std::invalid_argument("swing leg longer than L0");
  Eigen::Matrix3d V;
  const double h = 0.5 * T_swing;
  V << 1, 0, 0, 1, h, h * h, 1, T_swing, T_swing * T_swing;
  const Eigen::Vector3d rhs(q4_at_lo, params.L0 - params.delta_retract, params.L0);
  const Eigen::Vector3d b = V.partialPivLu().solve(rhs);
  RetractionReference ref;
  ref.b = {b(0), b(1), b(2)};
  ref.t_lo = t_lo;
  ref.T_swing = T_swing;
  ref.L0 = params.L0;
  return ref;
}

}  // namespace vslip
