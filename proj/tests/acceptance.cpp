// Acceptance run: one PASS/FAIL line per criterion, tolerances and time
// limits pinned below. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "treepsi/boundary.hpp"
#include "treepsi/config.hpp"
#include "treepsi/fourier_helgason.hpp"
#include "treepsi/kernel.hpp"
#include "treepsi/kernel_ops.hpp"
#include "treepsi/spectral.hpp"
#include "treepsi/sweep.hpp"
#include "treepsi/symbols.hpp"

using namespace treepsi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSeed = 20240521;

// Criterion 8: C calibrated once at q = 2 (largest observed ratio 0.028
// over the built-in families at eps in {0.4, 0.1}) and then frozen.
constexpr double kContinuityC = 0.06;
// Criterion 7: the weighted profile beyond R may not exceed its peak within R.
constexpr double kDecayGrowthLimit = 1.0;
// Criterion 9: width of the norm/eps band.
constexpr double kProductBand = 3.0;

const std::vector<FamilyKind> kFamilies{FamilyKind::bump_profile_only, FamilyKind::radial_eps,
                                        FamilyKind::shifted_k};

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

CylSymbol family(FamilyKind kind, const TreeParams& params, double eps) {
  FamilyParams fp;
  fp.epsilon = eps;
  return builtin_family(kind, params, fp);
}

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records `measured <= tolerance` under `label`.
  void require(const std::string& label, double measured, double tolerance) {
    const bool ok = std::isfinite(measured) && measured <= tolerance;
    pass = pass && ok;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s=%.3g<=%.3g%s", label.c_str(), measured, tolerance, ok ? "" : "!");
    if (!detail.empty()) detail += "  ";
    detail += buf;
  }
  void require(const std::string& label, bool ok) {
    pass = pass && ok;
    if (!detail.empty()) detail += "  ";
    detail += label + (ok ? "" : "!");
  }
};

int failures = 0;

void criterion(int number, double time_limit, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail += std::string("  exception: ") + e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require("time", seconds, time_limit);
  if (!out.pass) ++failures;
  std::printf("criterion %2d: %s  %s\n", number, out.pass ? "PASS" : "FAIL", out.detail.c_str());
  std::fflush(stdout);
}

// Exact measure algebra.
void measures(Outcome& out) {
  bool additive = true;
  for (int q : {2, 3, 5}) {
    additive = additive && cylinder_measure(q, 0) == Rational(1) &&
               cylinder_measure(q, 1) * (q + 1) == cylinder_measure(q, 0);
    for (int n = 1; n < 10; ++n) additive = additive && cylinder_measure(q, n + 1) * q == cylinder_measure(q, n);
  }
  out.require("refinement", additive);

  const auto p2 = TreeParams::make(2);
  const auto masses = e_partition(p2, parse_vertex("01", 2)).masses;
  out.require("E(01)=2/3,1/6,1/6",
              masses == std::vector<Rational>{Rational(2, 3), Rational(1, 6), Rational(1, 6)});

  bool total_one = true;
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    for (const auto& x : ball(params, Vertex{}, 1)) {
      for (const auto& y : ball(params, Vertex{}, 3)) {
        const int d = distance(x, y);
        Rational total(0);
        for (const auto& nb : nb_extensions(params, NbWord{x, {}}, d)) {
          total += radon_nikodym(params, x, y, nb) * cylinder_measure(q, d);
        }
        total_one = total_one && total == Rational(1);
      }
    }
  }
  out.require("RN mass 1", total_one);
}

void quadrature(Outcome& out) {
  double m0 = 0.0, annihilation = 0.0;
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    const SGrid grid = build_grid(params, 256);
    m0 = std::max(m0, std::abs(grid.moment(0) - 1.0));
    for (int d = 1; d <= 6; ++d) {
      for (const auto& word : {reduced_words(params, d).front(), reduced_words(params, d).back()}) {
        const auto e = e_partition(params, Vertex(word)).masses;
        cplx sum = 0.0;
        for (int j = 0; j <= d; ++j) {
          sum += to_double(e[static_cast<std::size_t>(j)]) * std::pow(q, j - d / 2.0) * grid.moment(2 * j - d);
        }
        annihilation = std::max(annihilation, std::abs(sum));
      }
    }
  }
  out.require("|M0-1|", m0, 1e-12);
  out.require("annihilation", annihilation, 1e-10);
}

void fourier(Outcome& out) {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 256);
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> normal;
  std::vector<FiniteFunction> fs(10);
  for (auto& f : fs) {
    for (const auto& x : ball(params, Vertex{}, 4)) f.support.emplace_back(x, cplx(normal(rng), normal(rng)));
  }
  double roundtrip = 0.0, inner = 0.0, symmetry = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const SpectralFunction F = fh_forward(fs[i], grid);
    for (const auto& [x, v] : fs[i].support) {
      roundtrip = std::max(roundtrip, std::abs(fh_inverse(F, grid, x) - v));
      symmetry = std::max(symmetry, symmetry_check(F, grid, x));
    }
    const FiniteFunction& g = fs[(i + 1) % fs.size()];
    cplx direct = 0.0;
    for (std::size_t k = 0; k < g.support.size(); ++k) direct += fs[i].support[k].second * std::conj(g.support[k].second);
    inner = std::max(inner, std::abs(plancherel_inner(fs[i], g, grid) - direct));
  }
  out.require("roundtrip", roundtrip, 1e-8);
  out.require("plancherel", inner, 1e-8);
  out.require("symmetry", symmetry, 1e-8);
}

void spherical(Outcome& out) {
  double worst = 0.0;
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    const auto samples = uniform_s_samples(params, 64);
    for (int d = 0; d <= 6; ++d) {
      const Vertex x(reduced_words(params, d).back());
      for (double s : samples) {
        worst = std::max(worst, std::abs(spherical_explicit(s, d, params) - spherical_via_boundary(s, x, params)));
      }
    }
  }
  out.require("explicit-vs-boundary", worst, 1e-10);
}

void quantization(Outcome& out) {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 256);
  out.require("|Op(1)-I|",
              max_abs((kernel_of_symbol(constant_symbol(params, 1.0), 4, grid) - identity_kernel(params, 4)).entries),
              1e-10);
  out.require("|Op(lambda)-Lap|",
              max_abs((kernel_of_symbol(profile_symbol(params, eigencurve_profile(params)), 4, grid) -
                       laplacian_kernel(params, 4))
                          .entries),
              1e-10);
  double moved = 0.0;
  const auto vertices = ball(params, Vertex{}, 2);
  for (FamilyKind kind : kFamilies) {
    const SymbolKernel k(family(kind, params, 0.3), grid);
    for (const Vertex& ref : {parse_vertex("1", 2), parse_vertex("02", 2), parse_vertex("210", 2)}) {
      for (const auto& x : vertices) {
        for (const auto& y : vertices) moved = std::max(moved, std::abs(k.entry(x, y) - k.entry_from_reference(x, y, ref)));
      }
    }
  }
  out.require("base-point", moved, 1e-12);
}

void commutator(Outcome& out) {
  double worst = 0.0;
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    const SGrid grid = build_grid(params, 256);
    const int radius = q == 2 ? 5 : 4;
    const KernelMatrix lap = laplacian_kernel(params, radius);
    for (FamilyKind kind : kFamilies) {
      for (double eps : {0.4, 0.1}) {
        const CylSymbol a = family(kind, params, eps);
        const KernelMatrix k = kernel_of_symbol(a, radius, grid);
        KernelMatrix comm = k;
        comm.entries = lap.entries * k.entries - k.entries * lap.entries;
        comm.known_range = -1;
        const KernelMatrix expect = kernel_of_symbol(commutator_symbol(a), radius - 1, grid);
        worst = std::max(worst, max_abs(restrict_kernel(comm, radius - 1).entries - expect.entries));
      }
    }
  }
  out.require("|K[Lap,Op(a)]-K_Op(c)|", worst, 1e-10);
}

void decay(Outcome& out) {
  const auto params = TreeParams::make(2);
  const SGrid grid = build_grid(params, 256);
  const int radius = 6;
  const DecayProfile p = decay_profile(kernel_of_symbol(family(FamilyKind::bump_profile_only, params, 0.1), radius, grid));
  double head = 0.0, tail = 0.0;
  for (std::size_t d = 0; d < p.max_abs.size() && d <= 12; ++d) {
    const double weighted = std::pow(1.0 + d, 4) * std::pow(2.0, d / 2.0) * p.max_abs[d];
    double& peak = static_cast<int>(d) <= radius ? head : tail;
    peak = std::max(peak, weighted);
  }
  // Finite C_4; the cap only guards against an overflowing fit.
  out.require("C4", p.constants[4], 1e6);
  out.require("max_{d>R}/max_{d<=R}", tail / head, kDecayGrowthLimit);
}

void continuity(Outcome& out) {
  double worst = 0.0;
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    const SGrid grid = build_grid(params, 256);
    const int radius = q == 2 ? 6 : 4;
    for (FamilyKind kind : kFamilies) {
      for (double eps : {0.4, 0.1}) {
        const CylSymbol a = family(kind, params, eps);
        ValidateOptions opts;
        opts.test_radius = 3;
        opts.epsilon = eps;
        opts.max_cross_order = 0;
        const SClassReport r = validate_class(a, opts);
        double shape = r.omega_norm[4];
        for (int k = 0; k <= 4; ++k) shape += r.sup_norms[static_cast<std::size_t>(k)];
        worst = std::max(worst, opnorm_estimate(kernel_of_symbol(a, radius, grid)).norm / shape);
      }
    }
  }
  out.require("opnorm/shape", worst, kContinuityC);
}

void sweep(Outcome& out) {
  RunConfig cfg;
  cfg.family = "shifted_k";
  cfg.sweep_radius = 5;
  cfg.tail_radius = 3;
  cfg.snodes = 256;
  cfg.epsilons = {0.4, 0.2, 0.1, 0.05};
  const auto rows = run_sweep(cfg);
  bool adjoint_down = true, product_down = true;
  double a_lo = kInf, a_hi = 0.0, p_lo = kInf, p_hi = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      adjoint_down = adjoint_down && rows[i].adjoint_norm <= rows[i - 1].adjoint_norm;
      product_down = product_down && rows[i].product_norm <= rows[i - 1].product_norm;
    }
    a_lo = std::min(a_lo, rows[i].adjoint_norm / rows[i].epsilon);
    a_hi = std::max(a_hi, rows[i].adjoint_norm / rows[i].epsilon);
    p_lo = std::min(p_lo, rows[i].product_norm / rows[i].epsilon);
    p_hi = std::max(p_hi, rows[i].product_norm / rows[i].epsilon);
  }
  out.require("adjoint nonincreasing", adjoint_down);
  out.require("product nonincreasing", product_down);
  out.require("adjoint/eps band", a_hi / a_lo, kProductBand);
  out.require("product/eps band", p_hi / p_lo, kProductBand);
}

double walk_count(const TreeParams& params, const Vertex& x, const Vertex& y, int steps) {
  if (steps == 0) return x == y ? 1.0 : 0.0;
  double total = 0.0;
  for (int c = 0; c <= params.q; ++c) total += walk_count(params, step(x, static_cast<Color>(c)), y, steps - 1);
  return total;
}

void oracles(Outcome& out) {
  double worst = 0.0;
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    const SGrid grid = build_grid(params, 256);
    const int radius = q == 2 ? 3 : 2;
    std::vector<CylSymbol> symbols{constant_symbol(params, 1.0), profile_symbol(params, eigencurve_profile(params))};
    for (FamilyKind kind : kFamilies) {
      for (double eps : {0.4, 0.1}) {
        symbols.push_back(family(kind, params, eps));
        symbols.push_back(commutator_symbol(family(kind, params, eps)));
      }
    }
    for (const auto& a : symbols) {
      worst = std::max(worst, max_abs((kernel_of_symbol(a, radius, grid, KernelMethod::grouped) -
                                        kernel_of_symbol(a, radius, grid, KernelMethod::naive))
                                           .entries));
    }
  }
  out.require("grouped-vs-naive", worst, 1e-12);

  double paths = 0.0;
  for (int q : {2, 3}) {
    const auto params = TreeParams::make(q);
    const KernelMatrix lap = laplacian_kernel(params, 4);
    const Composition sq = compose_kernels(lap, lap, 2);
    const Ball& inner = *sq.kernel.ball;
    const double scale = 1.0 / ((q + 1.0) * (q + 1.0));
    for (std::size_t i = 0; i < inner.size(); ++i) {
      for (std::size_t j = 0; j < inner.size(); ++j) {
        paths = std::max(paths, std::abs(sq.kernel.entries(i, j) - walk_count(params, inner[i], inner[j], 2) * scale));
      }
    }
  }
  out.require("Lap^2 path count", paths, 1e-15);
}

}  // namespace

int main() {
  criterion(1, 1.0, measures);
  criterion(2, 5.0, quadrature);
  criterion(3, 30.0, fourier);
  criterion(4, 60.0, spherical);
  criterion(5, 60.0, quantization);
  criterion(6, 60.0, commutator);
  criterion(7, 60.0, decay);
  criterion(8, 300.0, continuity);
  criterion(9, 600.0, sweep);
  criterion(10, 120.0, oracles);
  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
