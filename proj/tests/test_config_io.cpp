#include <doctest.h>

#include <sstream>

#include "treepsi/config.hpp"
#include "treepsi/io.hpp"
#include "treepsi/sweep.hpp"

using namespace treepsi;

namespace {

ConfigErrorKind error_kind(const std::vector<Setting>& overrides, const std::optional<std::string>& file = {}) {
  try {
    parse_config(overrides, file);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigErrorKind::invalid_value;
}

}  // namespace

TEST_CASE("config defaults and precedence") {
  const RunConfig d = parse_config({});
  CHECK(d.q == 2);
  CHECK(d.snodes == 256);
  CHECK(d.family == "radial_eps");
  CHECK(d.epsilons == std::vector<double>{0.4, 0.2, 0.1, 0.05});

  const std::string file = "# comment\nq = 2\nradius = 3 # trailing\n\nfamily = shifted_k\n";
  const RunConfig from_file = parse_config({}, file);
  CHECK(from_file.radius == 3);
  CHECK(from_file.family == "shifted_k");

  const RunConfig flagged = parse_config({{"q", "3"}}, file);
  CHECK(flagged.q == 3);
  CHECK(flagged.radius == 3);

  const RunConfig env = parse_config({{"out_dir", "flag"}}, std::nullopt, std::string("from_env"));
  CHECK(env.out_dir == "from_env");

  const RunConfig list = parse_config({{"epsilons", "0.3,0.2"}});
  CHECK(list.epsilons == std::vector<double>{0.3, 0.2});
}

TEST_CASE("config errors are classified") {
  CHECK(error_kind({{"q", "1"}}) == ConfigErrorKind::invalid_value);
  CHECK(error_kind({{"q", "two"}}) == ConfigErrorKind::invalid_value);
  CHECK(error_kind({{"epsilons", "0.1,0.2"}}) == ConfigErrorKind::invalid_value);
  CHECK(error_kind({{"family", "nope"}}) == ConfigErrorKind::invalid_value);
  CHECK(error_kind({{"tail_radius", "5"}}) == ConfigErrorKind::invalid_value);
  CHECK(error_kind({}, std::string("colour = red\n")) == ConfigErrorKind::unknown_key);
  CHECK(error_kind({{"radius", "16"}}) == ConfigErrorKind::cap_exceeded);
  CHECK(error_kind({{"cap", "10"}}) == ConfigErrorKind::cap_exceeded);
}

TEST_CASE("function CSV round trip") {
  const auto params = TreeParams::make(2);
  std::istringstream in("vertex_word,re,im\n,1,0\n\n01,0.25,-2\n2,1e-3,0.5\n");
  const FiniteFunction f = read_function_csv(in, params);
  REQUIRE(f.support.size() == 3);
  CHECK(f.support[0].first == Vertex{});
  CHECK(f.support[1].second == cplx(0.25, -2));

  std::ostringstream out;
  write_function_csv(out, f);
  std::istringstream again(out.str());
  const FiniteFunction g = read_function_csv(again, params);
  REQUIRE(g.support.size() == f.support.size());
  for (std::size_t i = 0; i < f.support.size(); ++i) {
    CHECK(g.support[i].first == f.support[i].first);
    CHECK(g.support[i].second == f.support[i].second);
  }
  CHECK(format_number(0.1) == "0.10000000000000001");

  std::istringstream repeated("0,1,0\n0,2,0\n");
  CHECK_THROWS_AS(read_function_csv(repeated, params), std::invalid_argument);
  std::istringstream short_line("0,1\n");
  CHECK_THROWS_AS(read_function_csv(short_line, params), std::invalid_argument);
  std::istringstream bad_number("0,x,0\n");
  CHECK_THROWS_AS(read_function_csv(bad_number, params), std::invalid_argument);
  std::istringstream bad_word("00,1,0\n");
  CHECK_THROWS(read_function_csv(bad_word, params));
}

TEST_CASE("kernel CSV layout") {
  const auto params = TreeParams::make(2);
  std::ostringstream out;
  write_kernel_csv(out, laplacian_kernel(params, 1));
  std::istringstream lines(out.str());
  std::string meta, header, row;
  std::getline(lines, meta);
  std::getline(lines, header);
  CHECK(meta.rfind("# q=2 radius=1", 0) == 0);
  CHECK(header == "x_word,y_word,d,re,im");
  int rows = 0;
  while (std::getline(lines, row)) ++rows;
  CHECK(rows == 16);
}

TEST_CASE("sweep output") {
  RunConfig cfg;
  cfg.family = "bump_profile_only";
  cfg.sweep_radius = 3;
  cfg.tail_radius = 1;
  cfg.snodes = 64;
  cfg.epsilons = {0.4, 0.2};
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].epsilon == 0.4);
  CHECK(rows[1].epsilon == 0.2);
  // An x-independent symbol has an exact adjoint.
  for (const auto& r : rows) CHECK(r.adjoint_norm <= 1e-10);

  std::ostringstream first, second;
  write_sweep_csv(first, rows);
  write_sweep_csv(second, run_sweep(cfg));
  CHECK(first.str() == second.str());
  CHECK(first.str().rfind("epsilon,adjoint_norm,product_norm,", 0) == 0);
}
