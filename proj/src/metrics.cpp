#include "vslip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vslip {

double transport_mass(Model model, const WalkerParams& params) {
  return (model == Model::Swing || model == Model::Knee) ? params.m_h + 2 * params.m_f : params.m_h;
}

StepMarks step_marks(const SimTrace& trace) {
  StepMarks m;
  if (trace.samples.empty()) return m;
  m.t.push_back(trace.samples.front().t);
  m.q1.push_back(trace.samples.front().state.q(0));
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::Touchdown) continue;
    m.t.push_back(e.t);
    m.q1.push_back(e.post_state.q(0));
  }
  return m;
}

double integrate_abs_power(const SimTrace& trace, double t0, double t1) {
  double sum = 0;
  const auto& s = trace.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1].t < t0 || s[i].t > t1) continue;
    sum += 0.5 * (std::abs(s[i - 1].power) + std::abs(s[i].power)) * (s[i].t - s[i - 1].t);
  }
  return sum;
}

namespace {

struct Window {
  int first = 0, last = 0;
  double t0 = 0, t1 = 0, dx = 0;
};

Window steady_window(const SimTrace& trace, const MetricsWindow& w) {
  const StepMarks m = step_marks(trace);
  const int steps = static_cast<int>(m.t.size()) - 1;
  if (steps - w.first_step + 1 < w.min_steps)
    throw InsufficientData("trace has " + std::to_string(std::max(steps, 0)) + " steps; need at least " +
                           std::to_string(w.first_step + w.min_steps - 1));
  Window out;
  out.first = w.first_step;
  out.last = steps;
  out.t0 = m.t[w.first_step - 1];
  out.t1 = m.t[steps];
  out.dx = m.q1[steps] - m.q1[w.first_step - 1];
  return out;
}

const TraceSample& sample_at(const SimTrace& trace, double t) {
  const auto it = std::lower_bound(trace.samples.begin(), trace.samples.end(), t,
                                   [](const TraceSample& s, double v) { return s.t < v; });
  if (it == trace.samples.end() || it->t != t) throw std::invalid_argument("no trace sample at event time");
  return *it;
}

}  // namespace

double cost_of_transport(const SimTrace& trace, Model model, const WalkerParams& params,
                         const MetricsWindow& window) {
  const Window w = steady_window(trace, window);
  if (!(w.dx > 0)) throw ModelError("cost of transport undefined for non-positive displacement");
  return integrate_abs_power(trace, w.t0, w.t1) / (transport_mass(model, params) * params.g0 * w.dx);
}

GaitMetrics gait_metrics(const SimTrace& trace, Model model, const WalkerParams& params,
                         const MetricsWindow& window) {
  const Window w = steady_window(trace, window);
  GaitMetrics g;
  g.first_step = w.first;
  g.last_step = w.last;
  g.t_begin = w.t0;
  g.t_end = w.t1;
  g.distance = w.dx;
  g.mean_velocity = w.dx / (w.t1 - w.t0);
  g.transport_mass = transport_mass(model, params);
  g.cost_of_transport = cost_of_transport(trace, model, params, window);
  const int n = w.last - w.first + 1;
  g.stride_period = (w.t1 - w.t0) / n;

  double ds_time = 0, e_sum = 0, e_weight = 0;
  g.energy_min = std::numeric_limits<double>::infinity();
  g.energy_max = -g.energy_min;
  const auto& s = trace.samples;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].t < w.t0 || s[i].t > w.t1) continue;
    g.energy_min = std::min(g.energy_min, s[i].H);
    g.energy_max = std::max(g.energy_max, s[i].H);
    if (i + 1 < s.size() && s[i + 1].t <= w.t1) {
      const double dt = s[i + 1].t - s[i].t;
      e_sum += 0.5 * (s[i].H + s[i + 1].H) * dt;
      e_weight += dt;
      if (s[i].state.phase == Phase::DoubleSupport) ds_time += dt;
      const double p = 0.5 * (s[i].power + s[i + 1].power) * dt;
      (p > 0 ? g.positive_work : g.negative_work) += p;
    }
  }
  g.energy_mean = e_weight > 0 ? e_sum / e_weight : 0.0;
  g.duty_factor = ds_time / (w.t1 - w.t0);

  double dissipated = 0;
  for (const auto& e : trace.events)
    if (e.kind == EventKind::Touchdown && e.t > w.t0 && e.t <= w.t1) dissipated += e.energy_dissipated;
  g.dissipated_impact_energy = dissipated / n;
  return g;
}

std::vector<double> energy_audit(const SimTrace& trace) {
  std::vector<double> out;
  if (trace.samples.empty()) return out;
  double H_prev = trace.samples.front().H;
  double W_prev = trace.samples.front().work;
  double jumps = 0;
  for (const auto& e : trace.events) {
    jumps += e.energy_change;
    if (e.kind != EventKind::Touchdown) continue;
    const TraceSample& pre = sample_at(trace, e.t);
    const double H = pre.H + e.energy_change;
    out.push_back(H - H_prev - (pre.work - W_prev) - jumps);
    H_prev = H;
    W_prev = pre.work;
    jumps = 0;
  }
  return out;
}

}  // namespace vslip
