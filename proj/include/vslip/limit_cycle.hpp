#ifndef VSLIP_LIMIT_CYCLE_HPP
#define VSLIP_LIMIT_CYCLE_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "vslip/integrator.hpp"
#include "vslip/reference.hpp"

namespace vslip {

/// Touchdown section of the passive SLIP. The hip height is fixed at
/// L0 sin(alpha0); `offset` is the horizontal distance from the trailing
/// foot to the hip.
struct SectionState {
  double offset = 0.25;  // [m]
  double dq1 = 1.2;      // [m/s]
  double dq2 = -0.3;     // [m/s]

  Eigen::Vector3d as_vector() const { return {offset, dq1, dq2}; }
  static SectionState from_vector(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
  bool operator==(const SectionState&) const = default;
};

/// Double-support state right after touchdown, trailing foot at the origin.
HybridState section_to_state(const SectionState& section, const WalkerParams& params);

/// Result of shooting one step of the passive SLIP from the section.
struct StepShot {
  SectionState next;
  HybridState end_state;  // post-touchdown state
  double T = 0, T_ds = 0, T_ss = 0;
  double step_length = 0;
  SimTrace trace;
};

/// Integrates the passive SLIP from the section to the next touchdown.
/// Throws GaitFailure if the walker does not reach touchdown.
StepShot shoot_step(const SectionState& section, const WalkerParams& params,
                    const IntegratorConfig& config = {});

class GaitFailure : public std::runtime_error {
 public:
  GaitFailure(const std::string& what, RunOutcome outcome)
      : std::runtime_error(what), outcome(outcome) {}
  RunOutcome outcome;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, SectionState last, double residual)
      : std::runtime_error(what), last(last), residual(residual) {}
  SectionState last;
  double residual;
};

struct LimitCycleOptions {
  /// Mean forward velocity selecting one member of the cycle family. Without
  /// it the Newton step is the minimum-norm correction.
  std::optional<double> target_velocity = 1.18;
  int max_iterations = 50;
  double tolerance = 1e-8;       // required Poincare residual
  double goal = 1e-11;           // residual at which iteration stops early
  double fd_step = 1e-6;
  IntegratorConfig integrator;
};

struct LimitCycle {
  WalkerParams params;
  SectionState section;
  HybridState state;  // post-touchdown state on the cycle
  double T = 0;       // step period [s]
  double T_ss = 0, T_ds = 0;
  double stride_length = 0;  // hip advance over one step [m]
  double energy = 0;         // H* [J]
  double mean_velocity = 0;
  double residual = 0;  // |P(x) - x| in section coordinates
  int iterations = 0;
  SimTrace trace;  // one step of the cycle
};

LimitCycle find_limit_cycle(const WalkerParams& params, const SectionState& guess = {},
                            const LimitCycleOptions& options = {});

/// Raised when the requested harmonics cannot meet the fit tolerance.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, int required) : std::runtime_error(what), required_harmonics(required) {}
  int required_harmonics;  // smallest count meeting the tolerance, or -1
};

inline constexpr int kDefaultHarmonics = 25;
inline constexpr double kFitTolerance = 1e-4;

/// Fourier fit of q2*(q1) and q1dot*(q1) over one step of the cycle.
ReferenceGait fit_reference(const LimitCycle& cycle, int harmonics = kDefaultHarmonics,
                            double tolerance = kFitTolerance);

/// Smallest harmonic count whose fit meets `tolerance`, or -1 up to `max_harmonics`.
int required_harmonics(const LimitCycle& cycle, double tolerance = kFitTolerance, int max_harmonics = 40);

}  // namespace vslip

#endif  // VSLIP_LIMIT_CYCLE_HPP
