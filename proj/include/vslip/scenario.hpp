#ifndef VSLIP_SCENARIO_HPP
#define VSLIP_SCENARIO_HPP

#include <optional>
#include <string>

#include "vslip/config.hpp"
#include "vslip/metrics.hpp"

namespace vslip {

/// Loads the reference named by the config, or finds the passive cycle and
/// fits the reference when none is given.
ReferenceBundle prepare_reference(const ScenarioConfig& config);

/// Post-touchdown initial state, with the seeded velocity perturbation.
HybridState initial_state(const ScenarioConfig& config, const ReferenceBundle& bundle);

StiffnessController make_controller(const ScenarioConfig& config, const ReferenceBundle& bundle);

struct ScenarioRun {
  RunResult run;
  std::optional<GaitMetrics> metrics;
  std::string metrics_error;
};

ScenarioRun run_scenario(const ScenarioConfig& config, const ReferenceBundle& bundle);

}  // namespace vslip

#endif  // VSLIP_SCENARIO_HPP
