// treepsi: command-line front end.
//
//   treepsi verify    [--q N] [--radius R] [--snodes K] ...
//   treepsi sweep     [--eps-list 0.4,0.2,...] [--tail T] ...
//   treepsi kernel    --family NAME [--eps E] [--k K] [--out FILE]
//   treepsi transform --in FILE [--out FILE]
//
// Every subcommand accepts --config FILE with `key = value` lines; flags
// given on the command line win over the file, and TREEPSI_OUT_DIR wins over
// both for the output directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "treepsi/config.hpp"
#include "treepsi/fourier_helgason.hpp"
#include "treepsi/io.hpp"
#include "treepsi/kernel.hpp"
#include "treepsi/sweep.hpp"
#include "treepsi/verify.hpp"

namespace {

using namespace treepsi;

enum ExitCode { kOk = 0, kChecksFailed = 1, kUsage = 2, kRuntime = 3 };

// Flags that map one-to-one onto configuration keys.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_file;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }

  RunConfig resolve() const {
    std::vector<Setting> overrides;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) overrides.emplace_back(key, values.at(key));
    }
    std::optional<std::string> file_text;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw ConfigError(ConfigErrorKind::invalid_value, "cannot read config file " + config_file);
      std::ostringstream ss;
      ss << in.rdbuf();
      file_text = ss.str();
    }
    std::optional<std::string> env;
    if (const char* v = std::getenv(kOutDirEnv)) env = v;
    return parse_config(overrides, file_text, env);
  }
};

void add_common(CLI::App* app, FlagSet& flags) {
  app->add_option("--config", flags.config_file, "key = value configuration file");
  flags.add(app, "--q", "q", "branching number (tree degree q+1)");
  flags.add(app, "--snodes", "snodes", "quadrature nodes on [0, tau]");
  flags.add(app, "--seed", "seed", "random seed");
}

void add_family(CLI::App* app, FlagSet& flags) {
  flags.add(app, "--family", "family", "bump_profile_only | radial_eps | shifted_k");
  flags.add(app, "--eps", "epsilon", "semiclassical parameter");
  flags.add(app, "--k", "shift", "shift count for shifted_k");
  flags.add(app, "--chi-radius", "chi_radius", "support radius of the spatial cutoff");
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

int run_kernel(const FlagSet& flags, const std::string& out_file, const std::string& symbol_csv,
               const std::vector<std::string>& profiles) {
  const RunConfig cfg = flags.resolve();
  const TreeParams params = TreeParams::make(cfg.q);
  const SGrid grid = build_grid(params, cfg.snodes);
  CylSymbol a;
  if (!symbol_csv.empty()) {
    std::ifstream in(symbol_csv);
    if (!in) throw std::runtime_error("cannot read " + symbol_csv);
    std::vector<SProfile> ps;
    for (const auto& name : profiles) ps.push_back(named_profile(name, params));
    if (ps.empty()) ps.push_back(named_profile("one", params));
    a = load_symbol_csv(in, params, ps);
  } else {
    FamilyParams fp;
    fp.epsilon = cfg.epsilon;
    fp.shift = cfg.shift;
    fp.chi_radius = cfg.chi_radius;
    a = builtin_family(parse_family(cfg.family), params, fp);
  }
  const KernelMatrix k = kernel_of_symbol(a, cfg.radius, grid);
  if (out_file.empty() || out_file == "-") {
    write_kernel_csv(std::cout, k);
  } else {
    auto out = open_output(std::filesystem::path(cfg.out_dir) / out_file);
    write_kernel_csv(out, k);
  }
  return kOk;
}

int run_transform(const FlagSet& flags, const std::string& in_file, const std::string& out_file,
                  int depth) {
  const RunConfig cfg = flags.resolve();
  const TreeParams params = TreeParams::make(cfg.q);
  FiniteFunction f;
  if (in_file.empty() || in_file == "-") {
    f = read_function_csv(std::cin, params);
  } else {
    std::ifstream in(in_file);
    if (!in) throw std::runtime_error("cannot read " + in_file);
    f = read_function_csv(in, params);
  }
  f.validate();
  const SGrid grid = build_grid(params, cfg.snodes);
  const SpectralFunction F = fh_forward(f, grid, depth);
  if (out_file.empty() || out_file == "-") {
    write_spectral_csv(std::cout, F, grid);
  } else {
    auto out = open_output(std::filesystem::path(cfg.out_dir) / out_file);
    write_spectral_csv(out, F, grid);
  }
  return kOk;
}

int run_sweep_command(const FlagSet& flags) {
  const RunConfig cfg = flags.resolve();
  const auto rows = run_sweep(cfg);
  auto out = open_output(std::filesystem::path(cfg.out_dir) / "sweep.csv");
  write_sweep_csv(out, rows);
  write_sweep_report(std::cout, cfg, rows);
  std::cout << "wrote " << (std::filesystem::path(cfg.out_dir) / "sweep.csv").string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-differential calculus on the homogeneous tree"};
  app.require_subcommand(1);

  FlagSet verify_flags;
  auto* verify = app.add_subcommand("verify", "run the invariant suite and print a pass/fail table");
  add_common(verify, verify_flags);
  add_family(verify, verify_flags);
  verify_flags.add(verify, "--radius", "radius", "ball radius R");

  FlagSet sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep of the adjoint and product remainders");
  add_common(sweep, sweep_flags);
  add_family(sweep, sweep_flags);
  sweep_flags.add(sweep, "--radius", "sweep_radius", "ball radius R");
  sweep_flags.add(sweep, "--tail", "tail_radius", "composition truncation radius T");
  sweep_flags.add(sweep, "--eps-list", "epsilons", "strictly decreasing, comma separated");
  sweep_flags.add(sweep, "--out-dir", "out_dir", "directory for sweep.csv");

  FlagSet kernel_flags;
  std::string kernel_out, symbol_csv;
  std::vector<std::string> profiles;
  auto* kernel = app.add_subcommand("kernel", "write the kernel of a symbol on ball(o, R) as CSV");
  add_common(kernel, kernel_flags);
  add_family(kernel, kernel_flags);
  kernel_flags.add(kernel, "--radius", "radius", "ball radius R");
  kernel_flags.add(kernel, "--out-dir", "out_dir", "directory for --out");
  kernel->add_option("--out", kernel_out, "output file (default stdout)");
  kernel->add_option("--symbol-csv", symbol_csv, "custom symbol table x_word,stub,term_index,re,im");
  kernel->add_option("--profile", profiles, "s-profile per term: one | bump | eigencurve");

  FlagSet transform_flags;
  std::string transform_in, transform_out;
  int transform_depth = -1;
  auto* transform = app.add_subcommand("transform", "Fourier-Helgason transform of a CSV function");
  add_common(transform, transform_flags);
  transform_flags.add(transform, "--out-dir", "out_dir", "directory for --out");
  transform->add_option("--in", transform_in, "input CSV vertex_word,re,im (default stdin)");
  transform->add_option("--out", transform_out, "output file (default stdout)");
  transform->add_option("--depth", transform_depth, "cylinder depth (default: support radius)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      const RunConfig cfg = verify_flags.resolve();
      const VerifyReport report = run_verify(cfg);
      print_report(std::cout, report);
      return report.all_pass() ? kOk : kChecksFailed;
    }
    if (sweep->parsed()) return run_sweep_command(sweep_flags);
    if (kernel->parsed()) return run_kernel(kernel_flags, kernel_out, symbol_csv, profiles);
    if (transform->parsed()) {
      return run_transform(transform_flags, transform_in, transform_out, transform_depth);
    }
  } catch (const ConfigError& e) {
    const char* kind = e.kind() == ConfigErrorKind::unknown_key    ? "unknown key"
                       : e.kind() == ConfigErrorKind::cap_exceeded ? "cap exceeded"
                                                                   : "invalid value";
    std::cerr << "treepsi: configuration error (" << kind << "): " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "treepsi: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
