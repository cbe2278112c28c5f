#ifndef VSLIP_METRICS_HPP
#define VSLIP_METRICS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vslip/integrator.hpp"

namespace vslip {

/// Steps are counted touchdown to touchdown; the run start is treated as
/// touchdown 0. The steady window covers steps first_step..last touchdown.
struct MetricsWindow {
  int first_step = 6;
  int min_steps = 3;
};

/// Total mass entering the cost of transport: the hip alone for the
/// massless-leg models, hip and both feet otherwise.
double transport_mass(Model model, const WalkerParams& params);

struct GaitMetrics {
  int first_step = 0, last_step = 0;
  double t_begin = 0, t_end = 0;
  double distance = 0;
  double mean_velocity = 0;
  double cost_of_transport = 0;
  double transport_mass = 0;
  double stride_period = 0;   // mean touchdown-to-touchdown time
  double duty_factor = 0;     // fraction of the window spent in double support
  double energy_min = 0, energy_max = 0, energy_mean = 0;
  double dissipated_impact_energy = 0;  // per step
  double positive_work = 0, negative_work = 0;  // actuator work over the window
};

/// Raised when a trace is too short for the requested window.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Touchdown times and post-touchdown hip positions, run start first.
struct StepMarks {
  std::vector<double> t;
  std::vector<double> q1;
};
StepMarks step_marks(const SimTrace& trace);

/// Trapezoid integral of |<u|y>| over samples with t in [t0, t1].
double integrate_abs_power(const SimTrace& trace, double t0, double t1);

/// C = 1/(m g dx) integral |<u|y>| dt over the steady window.
double cost_of_transport(const SimTrace& trace, Model model, const WalkerParams& params,
                         const MetricsWindow& window = {});

GaitMetrics gait_metrics(const SimTrace& trace, Model model, const WalkerParams& params,
                         const MetricsWindow& window = {});

/// Per-step energy balance H(end) - H(start) - W - sum(event energy changes),
/// where W is the integrated port power. Zero up to integration error.
std::vector<double> energy_audit(const SimTrace& trace);

}  // namespace vslip

#endif  // VSLIP_METRICS_HPP
