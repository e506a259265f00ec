#include "treepsi/config.hpp"

#include <charconv>
#include <sstream>

#include "treepsi/spectral.hpp"
#include "treepsi/symbols.hpp"
#include "treepsi/tree.hpp"

namespace treepsi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError(ConfigErrorKind::invalid_value,
                    "invalid value '" + value + "' for key '" + key + "'");
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value);
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "q") cfg.q = parse_integer<int>(key, value);
  else if (key == "radius") cfg.radius = parse_integer<int>(key, value);
  else if (key == "sweep_radius") cfg.sweep_radius = parse_integer<int>(key, value);
  else if (key == "snodes") cfg.snodes = parse_integer<int>(key, value);
  else if (key == "tail_radius") cfg.tail_radius = parse_integer<int>(key, value);
  else if (key == "family") cfg.family = value;
  else if (key == "epsilon") cfg.epsilon = parse_real(key, value);
  else if (key == "shift") cfg.shift = parse_integer<int>(key, value);
  else if (key == "chi_radius") cfg.chi_radius = parse_real(key, value);
  else if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "cap") cfg.cap = parse_integer<std::size_t>(key, value);
  else if (key == "epsilons") {
    cfg.epsilons.clear();
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.epsilons.push_back(parse_real(key, trim(item)));
  } else {
    throw ConfigError(ConfigErrorKind::unknown_key, "unknown configuration key '" + key + "'");
  }
}

std::vector<Setting> parse_config_text(const std::string& text) {
  std::vector<Setting> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(ConfigErrorKind::invalid_value,
                        "config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw ConfigError(ConfigErrorKind::invalid_value, what);
  };
  if (cfg.q < 2 || cfg.q > 35) fail("q must lie in [2, 35]");
  if (cfg.radius < 1) fail("radius must be at least 1");
  if (cfg.sweep_radius < 1) fail("sweep_radius must be at least 1");
  if (cfg.snodes < kMinGridNodes) fail("snodes must be at least " + std::to_string(kMinGridNodes));
  if (cfg.tail_radius < 0 || cfg.tail_radius >= cfg.sweep_radius) {
    fail("tail_radius must lie in [0, sweep_radius)");
  }
  try {
    parse_family(cfg.family);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (!(cfg.epsilon > 0.0)) fail("epsilon must be positive");
  if (cfg.shift < 0) fail("shift must be nonnegative");
  if (!(cfg.chi_radius > 0.0)) fail("chi_radius must be positive");
  if (cfg.epsilons.empty()) fail("epsilons must not be empty");
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    if (!(cfg.epsilons[i] > 0.0)) fail("epsilons must be positive");
    if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1])) fail("epsilons must be strictly decreasing");
  }
  if (cfg.cap == 0 || cfg.cap > kMaxCap) {
    throw ConfigError(ConfigErrorKind::cap_exceeded,
                      "cap must lie in [1, " + std::to_string(kMaxCap) + "]");
  }
  const int r = std::max(cfg.radius, cfg.sweep_radius);
  if (ball_size(cfg.q, r) > cfg.cap) {
    throw ConfigError(ConfigErrorKind::cap_exceeded,
                      "ball of radius " + std::to_string(r) + " at q=" + std::to_string(cfg.q) +
                          " has " + std::to_string(ball_size(cfg.q, r)) +
                          " vertices, above the cap of " + std::to_string(cfg.cap));
  }
}

RunConfig parse_config(const std::vector<Setting>& overrides,
                       const std::optional<std::string>& file_text,
                       const std::optional<std::string>& env_out_dir) {
  RunConfig cfg;
  if (file_text) {
    for (const auto& [k, v] : parse_config_text(*file_text)) apply_setting(cfg, k, v);
  }
  for (const auto& [k, v] : overrides) apply_setting(cfg, k, v);
  if (env_out_dir && !env_out_dir->empty()) cfg.out_dir = *env_out_dir;
  validate_config(cfg);
  return cfg;
}

}  // namespace treepsi
