#ifndef VSLIP_CONFIG_HPP
#define VSLIP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "vslip/integrator.hpp"
#include "vslip/limit_cycle.hpp"

namespace vslip {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` document with `#` comments. Keys are dotted paths and
/// are kept sorted, so serialization is canonical.
class KeyValueDoc {
 public:
  static KeyValueDoc parse(const std::string& text);
  static KeyValueDoc load(const std::filesystem::path& path);
  std::string serialize() const;

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
  void set(const std::string& key, double value);
  void set(const std::string& key, int value) { entries_[key] = std::to_string(value); }

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;

  /// Reads `key` into `out` when present; marks the key consumed.
  void read(const std::string& key, double& out) const;
  void read(const std::string& key, int& out) const;
  void read(const std::string& key, std::string& out) const;

  /// Throws ConfigError listing keys never read.
  void require_all_consumed() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  mutable std::map<std::string, bool> consumed_;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_params(KeyValueDoc& doc, const WalkerParams& params);
void write_gains(KeyValueDoc& doc, const ControlGains& gains);
void write_integrator(KeyValueDoc& doc, const IntegratorConfig& config);
void read_params(const KeyValueDoc& doc, WalkerParams& params);
void read_gains(const KeyValueDoc& doc, ControlGains& gains);
void read_integrator(const KeyValueDoc& doc, IntegratorConfig& config);

/// FNV-1a hash of the canonical serialization of the walker parameters.
std::uint64_t params_hash(const WalkerParams& params);

struct ScenarioConfig {
  std::string name = "run";
  Model model = Model::VSlip;
  WalkerParams params;
  ControlGains gains;
  IntegratorConfig integrator;
  int n_steps = 20;

  /// Initial touchdown-section state; the limit cycle when empty.
  std::optional<SectionState> initial;
  /// Uniform perturbation amplitude applied to the section velocities.
  double perturbation = 0.0;
  std::uint64_t seed = 1;

  double cycle_target_velocity = 1.18;  // <= 0 selects the minimum-norm search
  SectionState cycle_guess;
  int harmonics = kDefaultHarmonics;
  double torque_limit = std::numeric_limits<double>::infinity();

  std::string reference_file;  // optional precomputed reference
  std::string out_dir = "out";

  /// Throws ConfigError for unknown keys, malformed values or violated
  /// parameter invariants.
  static ScenarioConfig from_doc(const KeyValueDoc& doc);
  static ScenarioConfig parse(const std::string& text);
  static ScenarioConfig load(const std::filesystem::path& path);
  KeyValueDoc to_doc() const;
  std::string serialize() const { return to_doc().serialize(); }
  void validate() const;

  LimitCycleOptions cycle_options() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Limit cycle and fitted reference as stored on disk.
struct ReferenceBundle {
  LimitCycle cycle;  // without samples
  ReferenceGait reference;
};

inline constexpr int kReferenceFormatVersion = 1;

std::string serialize_reference(const ReferenceBundle& bundle);
/// Throws ConfigError on a version or parameter-hash mismatch.
ReferenceBundle parse_reference(const std::string& text, const WalkerParams& expected);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace vslip

#endif  // VSLIP_CONFIG_HPP
