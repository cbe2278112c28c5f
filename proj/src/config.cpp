#include "vslip/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace vslip {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': not a number: '" + text + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

KeyValueDoc KeyValueDoc::parse(const std::string& text) {
  KeyValueDoc doc;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(n) + ": empty key");
    if (doc.entries_.count(key)) throw ConfigError("line " + std::to_string(n) + ": duplicate key '" + key + "'");
    doc.entries_[key] = trim(line.substr(eq + 1));
  }
  return doc;
}

KeyValueDoc KeyValueDoc::load(const std::filesystem::path& path) {
  try {
    return parse(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string KeyValueDoc::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void KeyValueDoc::set(const std::string& key, double value) { entries_[key] = format_double(value); }

const std::string& KeyValueDoc::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + key + "'");
  consumed_[key] = true;
  return it->second;
}

double KeyValueDoc::get_double(const std::string& key) const { return parse_double(key, get(key)); }

int KeyValueDoc::get_int(const std::string& key) const {
  const std::string& text = get(key);
  int v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': not an integer: '" + text + "'");
  return v;
}

void KeyValueDoc::read(const std::string& key, double& out) const {
  if (has(key)) out = get_double(key);
}

void KeyValueDoc::read(const std::string& key, int& out) const {
  if (has(key)) out = get_int(key);
}

void KeyValueDoc::read(const std::string& key, std::string& out) const {
  if (has(key)) out = get(key);
}

void KeyValueDoc::require_all_consumed() const {
  std::string unknown;
  for (const auto& [k, v] : entries_)
    if (!consumed_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty()) throw ConfigError("unknown keys: " + unknown);
}

void write_params(KeyValueDoc& d, const WalkerParams& p) {
  d.set("params.m_h", p.m_h);
  d.set("params.m_f", p.m_f);
  d.set("params.L0", p.L0);
  d.set("params.alpha0", p.alpha0);
  d.set("params.k0", p.k0);
  d.set("params.k_min", p.k_min);
  d.set("params.k_max", p.k_max);
  d.set("params.g0", p.g0);
  d.set("params.L_e", p.L_e);
  d.set("params.delta_retract", p.delta_retract);
}

void read_params(const KeyValueDoc& d, WalkerParams& p) {
  d.read("params.m_h", p.m_h);
  d.read("params.m_f", p.m_f);
  d.read("params.L0", p.L0);
  if (d.has("params.alpha0") && d.has("params.alpha0_deg"))
    throw ConfigError("give either params.alpha0 or params.alpha0_deg");
  d.read("params.alpha0", p.alpha0);
  if (d.has("params.alpha0_deg")) p.alpha0 = d.get_double("params.alpha0_deg") * std::numbers::pi / 180.0;
  d.read("params.k0", p.k0);
  d.read("params.k_min", p.k_min);
  d.read("params.k_max", p.k_max);
  d.read("params.g0", p.g0);
  d.read("params.L_e", p.L_e);
  d.read("params.delta_retract", p.delta_retract);
}

void write_gains(KeyValueDoc& d, const ControlGains& g) {
  d.set("gains.kappa_p", g.kappa_p);
  d.set("gains.kappa_d", g.kappa_d);
  d.set("gains.kappa_v", g.kappa_v);
  d.set("gains.kappa_a", g.kappa_a);
  d.set("gains.kappa_w", g.kappa_w);
  d.set("gains.kappa_l", g.kappa_l);
  d.set("gains.kappa_n", g.kappa_n);
}

void read_gains(const KeyValueDoc& d, ControlGains& g) {
  d.read("gains.kappa_p", g.kappa_p);
  d.read("gains.kappa_d", g.kappa_d);
  d.read("gains.kappa_v", g.kappa_v);
  d.read("gains.kappa_a", g.kappa_a);
  d.read("gains.kappa_w", g.kappa_w);
  d.read("gains.kappa_l", g.kappa_l);
  d.read("gains.kappa_n", g.kappa_n);
}

void write_integrator(KeyValueDoc& d, const IntegratorConfig& c) {
  d.set("integrator.rel_tol", c.rel_tol);
  d.set("integrator.abs_tol", c.abs_tol);
  d.set("integrator.max_step", c.max_step);
  d.set("integrator.event_tol", c.event_tol);
  d.set("integrator.output_dt", c.output_dt);
}

void read_integrator(const KeyValueDoc& d, IntegratorConfig& c) {
  d.read("integrator.rel_tol", c.rel_tol);
  d.read("integrator.abs_tol", c.abs_tol);
  d.read("integrator.max_step", c.max_step);
  d.read("integrator.event_tol", c.event_tol);
  d.read("integrator.output_dt", c.output_dt);
}

std::uint64_t params_hash(const WalkerParams& params) {
  KeyValueDoc d;
  write_params(d, params);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : d.serialize()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

void read_section(const KeyValueDoc& d, const std::string& prefix, std::optional<SectionState>& out) {
  const bool any = d.has(prefix + ".offset") || d.has(prefix + ".dq1") || d.has(prefix + ".dq2");
  if (!any) return;
  SectionState s;
  s.offset = d.get_double(prefix + ".offset");
  s.dq1 = d.get_double(prefix + ".dq1");
  s.dq2 = d.get_double(prefix + ".dq2");
  out = s;
}

void write_section(KeyValueDoc& d, const std::string& prefix, const SectionState& s) {
  d.set(prefix + ".offset", s.offset);
  d.set(prefix + ".dq1", s.dq1);
  d.set(prefix + ".dq2", s.dq2);
}

}  // namespace

ScenarioConfig ScenarioConfig::from_doc(const KeyValueDoc& d) {
  ScenarioConfig c;
  try {
    d.read("name", c.name);
    if (d.has("model")) c.model = parse_model(d.get("model"));
    d.read("steps", c.n_steps);
    read_params(d, c.params);
    read_gains(d, c.gains);
    read_integrator(d, c.integrator);
    read_section(d, "initial", c.initial);
    d.read("initial.perturbation", c.perturbation);
    if (d.has("seed")) {
      const std::string& s = d.get("seed");
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), c.seed);
      if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("key 'seed': not an integer");
    }
    d.read("cycle.target_velocity", c.cycle_target_velocity);
    std::optional<SectionState> guess;
    read_section(d, "cycle.guess", guess);
    if (guess) c.cycle_guess = *guess;
    d.read("reference.harmonics", c.harmonics);
    d.read("reference.file", c.reference_file);
    d.read("control.torque_limit", c.torque_limit);
    d.read("output.dir", c.out_dir);
    d.require_all_consumed();
    c.validate();
  } catch (const ModelError& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ScenarioConfig ScenarioConfig::parse(const std::string& text) { return from_doc(KeyValueDoc::parse(text)); }

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  try {
    return from_doc(KeyValueDoc::load(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

KeyValueDoc ScenarioConfig::to_doc() const {
  KeyValueDoc d;
  d.set("name", name);
  d.set("model", std::string(to_string(model)));
  d.set("steps", n_steps);
  write_params(d, params);
  write_gains(d, gains);
  write_integrator(d, integrator);
  if (initial) write_section(d, "initial", *initial);
  d.set("initial.perturbation", perturbation);
  d.set("seed", std::to_string(seed));
  d.set("cycle.target_velocity", cycle_target_velocity);
  write_section(d, "cycle.guess", cycle_guess);
  d.set("reference.harmonics", harmonics);
  if (!reference_file.empty()) d.set("reference.file", reference_file);
  d.set("control.torque_limit", torque_limit);
  d.set("output.dir", out_dir);
  return d;
}

void ScenarioConfig::validate() const {
  params.validate();
  gains.validate();
  integrator.validate();
  if (n_steps < 1) throw ConfigError("steps must be at least 1");
  if (harmonics < 0) throw ConfigError("reference.harmonics must be non-negative");
  if (perturbation < 0) throw ConfigError("initial.perturbation must be non-negative");
  if (!(torque_limit > 0)) throw ConfigError("control.torque_limit must be positive");
  if (name.empty() || name.find('/') != std::string::npos) throw ConfigError("name must be a plain file stem");
}

LimitCycleOptions ScenarioConfig::cycle_options() const {
  LimitCycleOptions o;
  if (cycle_target_velocity > 0) o.target_velocity = cycle_target_velocity;
  else o.target_velocity.reset();
  o.integrator = integrator;
  return o;
}

namespace {

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v(i));
  return out;
}

Eigen::VectorXd split(const std::string& key, const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(parse_double(key, trim(item)));
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << v;
  return s.str();
}

}  // namespace

std::string serialize_reference(const ReferenceBundle& b) {
  KeyValueDoc d;
  d.set("format", std::string("vslip-reference"));
  d.set("version", kReferenceFormatVersion);
  d.set("params_hash", hex(params_hash(b.cycle.params)));
  write_params(d, b.cycle.params);
  const LimitCycle& c = b.cycle;
  write_section(d, "cycle.section", c.section);
  d.set("cycle.T", c.T);
  d.set("cycle.T_ss", c.T_ss);
  d.set("cycle.T_ds", c.T_ds);
  d.set("cycle.stride_length", c.stride_length);
  d.set("cycle.energy", c.energy);
  d.set("cycle.mean_velocity", c.mean_velocity);
  d.set("cycle.residual", c.residual);
  d.set("cycle.iterations", c.iterations);
  const ReferenceGait& r = b.reference;
  d.set("reference.origin", r.height.origin());
  d.set("reference.stride_length", r.stride_length);
  d.set("reference.T_swing", r.T_swing);
  d.set("reference.height", join(r.height.coefficients()));
  d.set("reference.speed", join(r.speed.coefficients()));
  d.set("reference.residual_height", r.residual_height);
  d.set("reference.residual_speed", r.residual_speed);
  return "# passive limit cycle and fitted hip reference\n" + d.serialize();
}

ReferenceBundle parse_reference(const std::string& text, const WalkerParams& expected) {
  const KeyValueDoc d = KeyValueDoc::parse(text);
  if (!d.has("format") || d.get("format") != "vslip-reference") throw ConfigError("not a reference file");
  if (d.get_int("version") != kReferenceFormatVersion)
    throw ConfigError("unsupported reference file version " + d.get("version"));
  ReferenceBundle b;
  read_params(d, b.cycle.params);
  if (d.get("params_hash") != hex(params_hash(b.cycle.params)))
    throw ConfigError("reference file parameter hash does not match its parameters");
  if (params_hash(expected) != params_hash(b.cycle.params))
    throw ConfigError("reference file was computed for different walker parameters");
  LimitCycle& c = b.cycle;
  std::optional<SectionState> s;
  read_section(d, "cycle.section", s);
  if (!s) throw ConfigError("reference file lacks the cycle section state");
  c.section = *s;
  c.state = section_to_state(c.section, c.params);
  c.T = d.get_double("cycle.T");
  c.T_ss = d.get_double("cycle.T_ss");
  c.T_ds = d.get_double("cycle.T_ds");
  c.stride_length = d.get_double("cycle.stride_length");
  c.energy = d.get_double("cycle.energy");
  c.mean_velocity = d.get_double("cycle.mean_velocity");
  c.residual = d.get_double("cycle.residual");
  c.iterations = d.get_int("cycle.iterations");
  ReferenceGait& r = b.reference;
  const double origin = d.get_double("reference.origin");
  r.stride_length = d.get_double("reference.stride_length");
  r.T_swing = d.get_double("reference.T_swing");
  try {
    r.height = FourierSeries(origin, r.stride_length, split("reference.height", d.get("reference.height")));
    r.speed = FourierSeries(origin, r.stride_length, split("reference.speed", d.get("reference.speed")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("reference file: ") + e.what());
  }
  r.residual_height = d.get_double("reference.residual_height");
  r.residual_speed = d.get_double("reference.residual_speed");
  d.require_all_consumed();
  return b;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace vslip
