#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "treepsi/kernel.hpp"
#include "treepsi/kernel_ops.hpp"

using namespace treepsi;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double svd_norm(const Eigen::MatrixXcd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

// Number of walks of length `steps` from x to y, by explicit stepping.
double walk_count(const TreeParams& params, const Vertex& x, const Vertex& y, int steps) {
  if (steps == 0) return x == y ? 1.0 : 0.0;
  double total = 0.0;
  for (int c = 0; c <= params.q; ++c) total += walk_count(params, step(x, static_cast<Color>(c)), y, steps - 1);
  return total;
}

CylSymbol family(FamilyKind kind, const TreeParams& params, double eps, int shift = 1) {
  FamilyParams fp;
  fp.epsilon = eps;
  fp.shift = shift;
  return builtin_family(kind, params, fp);
}

}  // namespace

TEST_CASE("Op(1) is the identity and Op(lambda) the Laplacian") {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 256);
  const KernelMatrix one = kernel_of_symbol(constant_symbol(params, 1.0), 4, grid);
  CHECK(max_abs(one.entries - Eigen::MatrixXcd::Identity(one.size(), one.size())) <= 1e-10);

  const KernelMatrix lam = kernel_of_symbol(profile_symbol(params, eigencurve_profile(params)), 4, grid);
  const Ball& b = *lam.ball;
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double expect = distance(b[i], b[j]) == 1 ? 1.0 / 3 : 0.0;
      worst = std::max(worst, std::abs(lam.entries(i, j) - expect));
    }
  }
  CHECK(worst <= 1e-10);

  // Brute force at R = 3 through the naive evaluator.
  const KernelMatrix naive = kernel_of_symbol(profile_symbol(params, eigencurve_profile(params)), 3, grid,
                                              KernelMethod::naive);
  CHECK(max_abs(naive.entries - laplacian_kernel(params, 3).entries) <= 1e-10);
}

TEST_CASE("radial symbols give symmetric, distance-only kernels") {
  const auto params = TreeParams::make(3);
  const SGrid grid = build_grid(params, 128);
  const KernelMatrix k = kernel_of_symbol(profile_symbol(params, bump_profile(params)), 3, grid);
  const Ball& b = *k.ball;
  std::vector<cplx> by_distance(7, cplx(NAN, 0));
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      CHECK(k.entries(i, j) == k.entries(j, i));
      const int d = distance(b[i], b[j]);
      if (std::isnan(by_distance[d].real())) by_distance[d] = k.entries(i, j);
      CHECK(std::abs(k.entries(i, j) - by_distance[d]) <= 1e-15);
    }
  }
}

TEST_CASE("grouped and naive evaluators agree") {
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    const SGrid grid = build_grid(params, 64);
    const int radius = q == 2 ? 3 : 2;
    std::vector<CylSymbol> symbols{
        constant_symbol(params, 1.0),
        family(FamilyKind::bump_profile_only, params, 0.1),
        family(FamilyKind::radial_eps, params, 0.3),
        family(FamilyKind::shifted_k, params, 0.3, 1),
        family(FamilyKind::shifted_k, params, 0.3, 2),
        commutator_symbol(family(FamilyKind::radial_eps, params, 0.3)),
    };
    for (const auto& a : symbols) {
      const KernelMatrix g = kernel_of_symbol(a, radius, grid, KernelMethod::grouped);
      const KernelMatrix n = kernel_of_symbol(a, radius, grid, KernelMethod::naive);
      CHECK(max_abs(g.entries - n.entries) <= 1e-12);
    }
  }
}

TEST_CASE("kernels do not depend on the reference vertex") {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 64);
  const SymbolKernel k(family(FamilyKind::shifted_k, params, 0.3, 2), grid);
  const auto vertices = ball(params, Vertex{}, 2);
  for (const Vertex& ref : {Vertex(Word{1}), Vertex(Word{0, 2})}) {
    for (const auto& x : vertices) {
      for (const auto& y : vertices) CHECK(std::abs(k.entry(x, y) - k.entry_from_reference(x, y, ref)) <= 1e-12);
    }
  }
}

TEST_CASE("double symbols") {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 64);
  const CylSymbol a = family(FamilyKind::shifted_k, params, 0.3, 1);
  const KernelMatrix left = kernel_of_double(left_double(a), 2, grid);
  CHECK(max_abs(left.entries - kernel_of_symbol(a, 2, grid).entries) <= 1e-12);

  const CylSymbol b = scale_profiles(a, exp_i_profile(0.7));
  const KernelMatrix right = kernel_of_double(right_double(b), 2, grid);
  const KernelMatrix mirrored = adjoint_kernel(kernel_of_symbol(conj(b), 2, grid));
  CHECK(max_abs(right.entries - mirrored.entries) <= 1e-12);

  DoubleSymbol zero;
  zero.params = params;
  CHECK(max_abs(kernel_of_double(zero, 2, grid).entries) == 0.0);
}

TEST_CASE("Laplacian kernel") {
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    const KernelMatrix lap = laplacian_kernel(params, 3);
    CHECK(lap.entries == lap.entries.adjoint());
    const Ball& b = *lap.ball;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i].length() < 3) CHECK(std::abs(lap.entries.row(i).sum() - 1.0) <= 1e-15);
    }
    CHECK(lap.at(Vertex{}, Vertex(Word{0})) == cplx(1.0 / (q + 1)));
    CHECK_THROWS_AS(lap.at(Vertex{}, Vertex(Word{0, 1, 0, 1})), DomainError);
  }
}

TEST_CASE("composition") {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 64);
  const KernelMatrix b = kernel_of_symbol(family(FamilyKind::radial_eps, params, 0.3), 4, grid);
  const Composition with_id = compose_kernels(identity_kernel(params, 4), b, 2);
  CHECK(with_id.tail.bound == 0.0);
  CHECK(max_abs(with_id.kernel.entries - restrict_kernel(b, 2).entries) == 0.0);

  // Two-step walks: Laplacian squared is the walk count over (q+1)^2.
  const KernelMatrix lap = laplacian_kernel(params, 4);
  const Composition sq = compose_kernels(lap, lap, 2);
  CHECK(sq.tail.bound == 0.0);
  const Ball& inner = *sq.kernel.ball;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    for (std::size_t j = 0; j < inner.size(); ++j) {
      const double expect = walk_count(params, inner[i], inner[j], 2) / 9.0;
      CHECK(sq.kernel.entries(i, j).real() == doctest::Approx(expect).epsilon(1e-15));
      if (distance(inner[i], inner[j]) == 2) CHECK(sq.kernel.entries(i, j).real() == doctest::Approx(1.0 / 9));
    }
  }

  const KernelMatrix a = kernel_of_symbol(family(FamilyKind::shifted_k, params, 0.3), 4, grid);
  double previous = INFINITY;
  for (int t = 0; t <= 3; ++t) {
    const Composition c = compose_kernels(a, b, t);
    CHECK(c.tail.bound >= 0.0);
    CHECK(c.tail.bound <= previous);
    previous = c.tail.bound;
    CHECK(std::isfinite(decay_profile(c.kernel).constants[3]));
  }

  CHECK_THROWS_AS(compose_kernels(a, b, 5), std::invalid_argument);
  CHECK_THROWS_AS(compose_kernels(a, laplacian_kernel(params, 3), 1), std::invalid_argument);
  CHECK_THROWS_AS(compose_kernels(a, kernel_of_symbol(constant_symbol(params, 1.0), 4, build_grid(params, 32)), 1),
                  std::invalid_argument);
}

// The series against a direct sum over z in a ball around the geodesic.
TEST_CASE("Schur series matches brute-force enumeration") {
  const auto params = TreeParams::make(2);
  const int branch_depth = 8;
  const Vertex x;
  for (int dist = 0; dist <= 4; ++dist) {
    const Vertex y(reduced_words(params, dist).front());
    for (int tail : {-1, 1}) {
      double direct = 0.0;
      for (const auto& z : ball(params, x, dist + branch_depth)) {
        const int a = distance(x, z), b = distance(z, y);
        const int off = (a + b - dist) / 2;
        if (off > branch_depth - 1 || a <= tail || b <= tail) continue;
        direct += std::pow(2.0, -off) * std::pow(1.0 + a, -3) * std::pow(1.0 + b, -3);
      }
      CHECK(schur_series(2, dist, tail, branch_depth - 1, false) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
  const double lemma = schur_lemma_constant(2);
  CHECK(lemma >= 1.0);
  CHECK(std::isfinite(lemma));
}

TEST_CASE("composition constants obey the Schur bound") {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 128);
  const double lemma = schur_lemma_constant(2);
  const KernelMatrix a = kernel_of_symbol(family(FamilyKind::radial_eps, params, 0.2), 6, grid);
  const KernelMatrix b = kernel_of_symbol(family(FamilyKind::shifted_k, params, 0.2), 6, grid);
  const Composition c = compose_kernels(a, b, 0);
  CHECK(decay_profile(c.kernel).constants[3] <=
        lemma * decay_profile(a).constants[3] * decay_profile(b).constants[3]);
}

TEST_CASE("adjoints") {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 64);
  const KernelMatrix a = kernel_of_symbol(family(FamilyKind::shifted_k, params, 0.3), 3, grid);
  CHECK(adjoint_kernel(adjoint_kernel(a)).entries == a.entries);
  const KernelMatrix lap = laplacian_kernel(params, 3);
  CHECK(adjoint_kernel(lap).entries == lap.entries);
  KernelMatrix ilap = lap;
  ilap.entries *= cplx(0, 1);
  CHECK(adjoint_kernel(ilap).entries == -ilap.entries);

  // An x-independent real profile gives a self-adjoint Op(a).
  const CylSymbol bump = family(FamilyKind::bump_profile_only, params, 0.1);
  const KernelMatrix rem = adjoint_kernel(kernel_of_symbol(bump, 3, grid)) - kernel_of_symbol(conj(bump), 3, grid);
  for (double c : negligibility_report(rem)) CHECK(c <= 1e-10);
  for (double c : negligibility_report(zero_kernel(params, 3))) CHECK(c == 0.0);
}

TEST_CASE("adjoint remainder constants shrink with epsilon") {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 128);
  double previous = INFINITY;
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const CylSymbol a = family(FamilyKind::radial_eps, params, eps);
    const KernelMatrix rem = restrict_kernel(
        adjoint_kernel(kernel_of_symbol(a, 5, grid)) - kernel_of_symbol(conj(a), 5, grid), 2);
    const double c3 = negligibility_report(rem)[3];
    CHECK(c3 < previous);
    previous = c3;
  }
}

TEST_CASE("commutator with the Laplacian") {
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    const SGrid grid = build_grid(params, 64);
    const int radius = 3;
    const CylSymbol constant = constant_symbol(params, 2.0);
    const CylSymbol zero_c = commutator_symbol(constant);
    CHECK(zero_c.depth == 1);
    const CylSymbol radial = profile_symbol(params, bump_profile(params));
    for (const auto& x : ball(params, Vertex{}, 2)) {
      for (const auto& w : reduced_words(params, 1)) {
        CHECK(std::abs(eval(zero_c, x, w, 0.3)) <= 1e-15);
        CHECK(std::abs(eval(commutator_symbol(radial), x, w, 0.3)) <= 1e-15);
      }
    }
    const KernelMatrix lap = laplacian_kernel(params, radius);
    for (FamilyKind kind : {FamilyKind::bump_profile_only, FamilyKind::radial_eps, FamilyKind::shifted_k}) {
      const CylSymbol a = family(kind, params, 0.4);
      const KernelMatrix k = kernel_of_symbol(a, radius, grid);
      KernelMatrix comm = k;
      comm.entries = lap.entries * k.entries - k.entries * lap.entries;
      const KernelMatrix c = kernel_of_symbol(commutator_symbol(a), radius - 1, grid);
      CHECK(max_abs(restrict_kernel(comm, radius - 1).entries - c.entries) <= 1e-10);
    }
  }
}

TEST_CASE("decay profiles") {
  const auto params = TreeParams::make(2);
  const DecayProfile id = decay_profile(identity_kernel(params, 3));
  CHECK(id.max_abs[0] == 1.0);
  for (std::size_t d = 1; d < id.max_abs.size(); ++d) CHECK(id.max_abs[d] == 0.0);
  for (double c : id.constants) CHECK(c == 1.0);

  const DecayProfile lap = decay_profile(laplacian_kernel(params, 3));
  CHECK(lap.max_abs[1] == doctest::Approx(1.0 / 3));
  CHECK(lap.constants[0] == doctest::Approx(std::sqrt(2.0) / 3));
  CHECK(lap.constants[2] == doctest::Approx(4 * std::sqrt(2.0) / 3));

  const SGrid grid = build_grid(params, 128);
  const CylSymbol a = family(FamilyKind::radial_eps, params, 0.3);
  ValidateOptions opts;
  opts.test_radius = 2;
  opts.s_samples = 9;
  opts.max_cross_order = 0;
  const SClassReport report = validate_class(a, opts);
  const DecayProfile p = decay_profile(kernel_of_symbol(a, 4, grid), &report, 1.0);
  REQUIRE(p.predicted_shape);
  for (int n = 1; n < kDecayOrders; ++n) CHECK(p.constants[n] >= p.constants[n - 1]);
  CHECK_FALSE(p.flagged);
  CHECK(decay_profile(kernel_of_symbol(a, 4, grid), &report, 1e-9).flagged);
}

TEST_CASE("operator norm estimates") {
  const auto params = TreeParams::make(2);
  CHECK(opnorm_estimate(identity_kernel(params, 3)).norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(opnorm_estimate(zero_kernel(params, 3)).norm == 0.0);

  const double full = 2 * std::sqrt(2.0) / 3;
  double previous = 0.0;
  for (int r = 2; r <= 8; r += 2) {
    const NormEstimate e = opnorm_estimate(laplacian_kernel(params, r));
    CHECK(e.converged);
    CHECK(e.norm <= full + 1e-8);
    CHECK(e.norm >= previous);
    previous = e.norm;
  }

  const SGrid grid = build_grid(params, 64);
  const KernelMatrix k = kernel_of_symbol(family(FamilyKind::shifted_k, params, 0.3), 3, grid);
  const NormEstimate e = opnorm_estimate(k);
  CHECK(e.norm == doctest::Approx(svd_norm(k.entries)).epsilon(1e-6));
  CHECK(opnorm_estimate(k).norm == e.norm);
}

TEST_CASE("sharp product") {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 128);
  const int radius = 5, tail = 3;
  const CylSymbol one = constant_symbol(params, 1.0);
  const CylSymbol a = family(FamilyKind::radial_eps, params, 0.3);
  const CylSymbol b = family(FamilyKind::shifted_k, params, 0.3);

  auto compare = [&](const SharpProduct& p, auto&& expected) {
    double worst = 0.0;
    const Ball& inner = *p.ball;
    for (std::size_t x = 0; x < inner.size(); ++x) {
      for (std::size_t w = 0; w < p.stubs.size(); ++w) {
        for (std::size_t k = 0; k < p.n_nodes; k += 7) {
          worst = std::max(worst, std::abs(p.at(x, w, k) - expected(inner[x], p.stubs[w], grid.node(k))));
        }
      }
    }
    return worst;
  };

  // a#1 = a for omega-independent a: within the certified tail, and the
  // error itself shrinks as the truncation radius grows.
  const auto eval_a = [&](const Vertex& x, const Word& w, double s) { return eval(a, x, w, s); };
  const SharpProduct a_one = sharp_product_symbol(a, one, radius, tail, grid);
  CHECK(compare(a_one, eval_a) <= a_one.tail.bound + 1e-10);
  const SharpProduct near = sharp_product_symbol(a, one, 3, 2, grid);
  const SharpProduct far = sharp_product_symbol(a, one, 7, 6, grid);
  CHECK(compare(far, eval_a) <= far.tail.bound + 1e-10);
  CHECK(compare(far, eval_a) <= 0.1 * compare(near, eval_a));

  const SharpProduct one_b = sharp_product_symbol(one, b, radius, tail, grid);
  CHECK(compare(one_b, [&](const Vertex& x, const Word& w, double s) { return eval(b, x, w, s); }) <= 1e-10);

  const SharpProduct frozen = sharp_product_frozen(a, b, radius, tail, grid);
  CHECK(compare(frozen, [&](const Vertex& x, const Word& w, double s) {
          return eval(a, x, w, s) * eval(b, x, w, s);
        }) <= frozen.tail.bound + 1e-10);
}
