#ifndef VSLIP_TYPES_HPP
#define VSLIP_TYPES_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace vslip {

// Configuration and momentum vectors never exceed four entries (knee model);
// fixed maximum sizes keep every evaluation allocation-free.
constexpr int kMaxDof = 4;
constexpr int kMaxInputs = 3;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxDof, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDof, kMaxDof>;
template <typename Scalar>
using InputVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxInputs, 1>;
template <typename Scalar>
using InputMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDof, kMaxInputs>;

using Vecd = Vec<double>;
using Matd = Mat<double>;

/// Walker model family. The passive SLIP and the V-SLIP share phases; they
/// differ only in whether the stiffness inputs are used.
enum class Model { Slip, VSlip, Swing, Knee };

enum class Phase { DoubleSupport, SingleSupportVSLIP, SingleSupportSwing, SingleSupportKnee };

std::string_view to_string(Model model);
std::string_view to_string(Phase phase);
Model parse_model(std::string_view name);

/// Single-support phase variant used by a model family.
constexpr Phase single_support_phase(Model model) {
  switch (model) {
    case Model::Swing: return Phase::SingleSupportSwing;
    case Model::Knee: return Phase::SingleSupportKnee;
    default: return Phase::SingleSupportVSLIP;
  }
}

constexpr int dof(Phase phase) {
  switch (phase) {
    case Phase::SingleSupportSwing: return 3;
    case Phase::SingleSupportKnee: return 4;
    default: return 2;
  }
}

/// Number of control inputs available in a phase.
constexpr int input_count(Phase phase) {
  switch (phase) {
    case Phase::DoubleSupport: return 2;
    case Phase::SingleSupportVSLIP: return 1;
    case Phase::SingleSupportSwing: return 2;
    case Phase::SingleSupportKnee: return 3;
  }
  return 0;
}

/// Raised when a model is evaluated outside its domain of validity.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical parameters of the walker. Defaults reproduce the nominal
/// controlled V-SLIP walker; m_f only enters the swing and knee models.
struct WalkerParams {
  double m_h = 15.0;                                    // hip mass [kg]
  double m_f = 2.5;                                     // foot mass [kg]
  double L0 = 1.0;                                      // spring rest length [m]
  double alpha0 = 62.5 * std::numbers::pi / 180.0;      // angle of attack [rad]
  double k0 = 2000.0;                                   // nominal stiffness [N/m]
  double k_min = 0.0;
  double k_max = 10000.0;
  double g0 = 9.81;
  double L_e = 0.01;                                    // transition band [m]
  double delta_retract = 0.075;                         // swing-leg retraction [m]

  /// Throws ModelError naming the first violated invariant.
  void validate() const;

  bool operator==(const WalkerParams&) const = default;
};

struct ControlGains {
  double kappa_p = 350.0;
  double kappa_d = 40.0;
  double kappa_v = 15.0;
  double kappa_a = 1000.0;
  double kappa_w = 40.0;
  double kappa_l = 1000.0;
  double kappa_n = 40.0;

  void validate() const;

  bool operator==(const ControlGains&) const = default;
};

/// Hybrid state of the walker.
///
/// In double support c1 is the leading foot and c2 the trailing foot. In
/// single support c1 is the stance foot and c2 is unused.
template <typename Scalar>
struct BasicHybridState {
  Phase phase = Phase::DoubleSupport;
  Vec<Scalar> q = Vec<Scalar>::Zero(2);
  Vec<Scalar> p = Vec<Scalar>::Zero(2);
  Scalar c1 = Scalar(0);
  Scalar c2 = Scalar(0);
  Scalar t_phase = Scalar(0);
  Scalar t_lo = Scalar(0);
};

using HybridState = BasicHybridState<double>;

/// Checks the phase invariants of a state; throws ModelError on violation.
void check_state(const HybridState& state, const WalkerParams& params);

/// Control inputs of the walker. Inputs that do not exist in the current
/// phase are left empty.
struct ControlInput {
  std::optional<double> u1;
  std::optional<double> u2;
  std::optional<double> tau1;
  std::optional<double> tau2;

  /// Packs the present inputs in the column order of the phase input matrix.
  InputVec<double> as_vector(Phase phase) const;
  static ControlInput from_vector(Phase phase, const InputVec<double>& u);
  static ControlInput zero(Phase phase);
};

}  // namespace vslip

#endif  // VSLIP_TYPES_HPP
