#include "vslip/scenario.hpp"

#include <random>

namespace vslip {

ReferenceBundle prepare_reference(const ScenarioConfig& config) {
  if (!config.reference_file.empty())
    return parse_reference(read_file(config.reference_file), config.params);
  ReferenceBundle b;
  b.cycle = find_limit_cycle(config.params, config.cycle_guess, config.cycle_options());
  b.reference = fit_reference(b.cycle, config.harmonics);
  return b;
}

HybridState initial_state(const ScenarioConfig& config, const ReferenceBundle& bundle) {
  SectionState s = config.initial.value_or(bundle.cycle.section);
  if (config.perturbation > 0) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> noise(-config.perturbation, config.perturbation);
    s.dq1 += noise(rng);
    s.dq2 += noise(rng);
  }
  return section_to_state(s, config.params);
}

StiffnessController make_controller(const ScenarioConfig& config, const ReferenceBundle& bundle) {
  if (config.model == Model::Slip) return StiffnessController::passive(config.params);
  StiffnessController c(config.model, config.params, config.gains,
                        std::make_shared<const ReferenceGait>(bundle.reference));
  c.set_torque_limit(config.torque_limit);
  return c;
}

ScenarioRun run_scenario(const ScenarioConfig& config, const ReferenceBundle& bundle) {
  ScenarioRun out;
  const StiffnessController controller = make_controller(config, bundle);
  out.run = run_gait(initial_state(config, bundle), controller, config.integrator, config.n_steps);
  try {
    out.metrics = gait_metrics(out.run.trace, config.model, config.params);
  } catch (const std::exception& e) {
    out.metrics_error = e.what();
  }
  return out;
}

}  // namespace vslip
