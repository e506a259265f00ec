#pragma once

// Run configuration: defaults, a line-oriented `key = value` file, and
// command-line overrides applied on top.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace treepsi {

struct RunConfig {
  int q = 2;
  int radius = 4;
  int sweep_radius = 5;
  int snodes = 256;
  int tail_radius = 3;
  std::string family = "radial_eps";
  double epsilon = 0.1;
  int shift = 1;
  double chi_radius = 4.0;
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
  std::uint64_t seed = 20240521;
  std::string out_dir = ".";
  std::size_t cap = 100000;
};

enum class ConfigErrorKind { invalid_value, unknown_key, cap_exceeded };

class ConfigError : public std::runtime_error {
public:
  ConfigError(ConfigErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ConfigErrorKind kind() const { return kind_; }

private:
  ConfigErrorKind kind_;
};

inline constexpr const char* kOutDirEnv = "TREEPSI_OUT_DIR";
inline constexpr std::size_t kMaxCap = 5000000;

using Setting = std::pair<std::string, std::string>;

/// Sets one key from its textual value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; `#` starts a comment.
std::vector<Setting> parse_config_text(const std::string& text);

/// Defaults, then the file settings, then `overrides` (command-line flags),
/// then `env_out_dir` if given. Throws ConfigError.
RunConfig parse_config(const std::vector<Setting>& overrides,
                       const std::optional<std::string>& file_text = std::nullopt,
                       const std::optional<std::string>& env_out_dir = std::nullopt);

/// Checks ranges, the epsilon ordering and the enumeration caps.
void validate_config(const RunConfig& cfg);

}  // namespace treepsi
