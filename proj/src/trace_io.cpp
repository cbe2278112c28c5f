#include "vslip/trace_io.hpp"

#include <cstdio>

namespace vslip {

namespace {

std::string num(double v) {
  char buf[40];
  if (v == 0) v = 0.0;  // no negative zero
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append(std::string& line, const std::string& field) {
  if (!line.empty()) line += ',';
  line += field;
}

}  // namespace

std::vector<std::string> trace_columns() {
  return {"t",  "phase", "q1", "q2",   "q3",   "q4", "p1", "p2", "p3", "p4", "u1", "u2", "tau1", "tau2",
          "h1", "h2",    "h3", "h4",   "K",    "V",  "H",  "power", "work", "clamped", "regime", "c1", "c2"};
}

std::string trace_csv(const SimTrace& trace) {
  std::string out;
  std::string header;
  for (const auto& c : trace_columns()) append(header, c);
  out += header + '\n';
  for (const auto& s : trace.samples) {
    std::string line;
    append(line, num(s.t));
    append(line, std::string(to_string(s.state.phase)));
    for (int i = 0; i < 4; ++i) append(line, num(i < s.state.q.size() ? s.state.q(i) : 0.0));
    for (int i = 0; i < 4; ++i) append(line, num(i < s.state.p.size() ? s.state.p(i) : 0.0));
    for (const auto* u : {&s.u.u1, &s.u.u2, &s.u.tau1, &s.u.tau2}) append(line, num(u->value_or(0.0)));
    for (double h : {s.errors.h1, s.errors.h2, s.errors.h3, s.errors.h4}) append(line, num(h));
    append(line, num(s.K));
    append(line, num(s.V));
    append(line, num(s.H));
    append(line, num(s.power));
    append(line, num(s.work));
    append(line, s.clamped ? "1" : "0");
    append(line, std::string(to_string(s.regime)));
    append(line, num(s.state.c1));
    append(line, num(s.state.phase == Phase::DoubleSupport ? s.state.c2 : 0.0));
    out += line + '\n';
  }
  return out;
}

std::string events_csv(const SimTrace& trace) {
  std::string out = "t,kind,from,to,q1,q2,energy_dissipated,energy_change\n";
  for (const auto& e : trace.events) {
    std::string line;
    append(line, num(e.t));
    append(line, std::string(to_string(e.kind)));
    append(line, std::string(to_string(e.pre_state.phase)));
    append(line, std::string(to_string(e.post_state.phase)));
    append(line, num(e.pre_state.q(0)));
    append(line, num(e.pre_state.q(1)));
    append(line, num(e.energy_dissipated));
    append(line, num(e.energy_change));
    out += line + '\n';
  }
  return out;
}

std::string metrics_block(const std::string& name, Model model, const GaitMetrics& m) {
  std::string out = "[" + name + "]\n";
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  kv("model", std::string(to_string(model)));
  kv("window.first_step", std::to_string(m.first_step));
  kv("window.last_step", std::to_string(m.last_step));
  kv("window.t_begin", num(m.t_begin));
  kv("window.t_end", num(m.t_end));
  kv("distance", num(m.distance));
  kv("mean_velocity", num(m.mean_velocity));
  kv("cost_of_transport", num(m.cost_of_transport));
  kv("transport_mass", num(m.transport_mass));
  kv("stride_period", num(m.stride_period));
  kv("duty_factor", num(m.duty_factor));
  kv("energy_min", num(m.energy_min));
  kv("energy_max", num(m.energy_max));
  kv("energy_mean", num(m.energy_mean));
  kv("dissipated_impact_energy", num(m.dissipated_impact_energy));
  kv("positive_work", num(m.positive_work));
  kv("negative_work", num(m.negative_work));
  return out;
}

std::string compare_table(const std::vector<CompareRow>& rows) {
  std::string out =
      "name,model,status,mean_velocity,cost_of_transport,duty_factor,stride_period,energy_min,energy_max,"
      "energy_mean\n";
  for (const auto& r : rows) {
    std::string line;
    append(line, r.name);
    append(line, std::string(to_string(r.model)));
    std::string status = r.status;
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    append(line, status);
    if (r.metrics) {
      const GaitMetrics& m = *r.metrics;
      for (double v : {m.mean_velocity, m.cost_of_transport, m.duty_factor, m.stride_period, m.energy_min,
                       m.energy_max, m.energy_mean})
        append(line, num(v));
    } else {
      for (int i = 0; i < 7; ++i) append(line, "");
    }
    out += line + '\n';
  }
  return out;
}

}  // namespace vslip
