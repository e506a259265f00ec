#include "treepsi/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <random>

#include "treepsi/boundary.hpp"
#include "treepsi/fourier_helgason.hpp"
#include "treepsi/kernel.hpp"
#include "treepsi/kernel_ops.hpp"
#include "treepsi/spectral.hpp"
#include "treepsi/symbols.hpp"
#include "treepsi/tree.hpp"

namespace treepsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

class Suite {
public:
  explicit Suite(VerifyReport& report) : report_(report) {}

  // Runs `measure` and records it against `tolerance`. An exception counts
  // as a failure with an infinite measurement.
  void check(const std::string& name, double tolerance, const std::function<double()>& measure) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckRow row;
    row.name = name;
    row.tolerance = tolerance;
    try {
      row.measured = measure();
    } catch (const std::exception& e) {
      row.name += " (" + std::string(e.what()) + ")";
      row.measured = kInf;
    }
    row.pass = std::isfinite(row.measured) && row.measured <= tolerance;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report_.rows.push_back(std::move(row));
  }

private:
  VerifyReport& report_;
};

FiniteFunction random_function(const TreeParams& params, int radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FiniteFunction f;
  for (const auto& x : ball(params, Vertex{}, radius)) f.support.emplace_back(x, cplx(u(rng), u(rng)));
  return f;
}

KernelMatrix product(const KernelMatrix& a, const KernelMatrix& b) {
  KernelMatrix out = a;
  out.entries = a.entries * b.entries;
  out.known_range = -1;
  return out;
}

void tree_checks(Suite& suite, const TreeParams& params, int radius) {
  const int r = std::min(radius, 3);
  suite.check("tree: distance symmetric, triangle inequality on ball(o," + std::to_string(r) + ")", 0,
              [&] {
                const auto v = ball(params, Vertex{}, r);
                double bad = 0;
                for (const auto& x : v) {
                  for (const auto& y : v) {
                    const int dxy = distance(x, y);
                    if (dxy != distance(y, x) || (dxy == 0) != (x == y)) ++bad;
                    for (const auto& z : v) {
                      if (dxy > distance(x, z) + distance(z, y)) ++bad;
                    }
                  }
                }
                return bad;
              });
  suite.check("tree: sphere sizes (q+1)q^(n-1) around o and a neighbour, n <= 5", 0, [&] {
    double bad = 0;
    for (const Vertex& c : {Vertex{}, Vertex{Word{0}}}) {
      for (int n = 0; n <= 5; ++n) {
        const auto s = sphere(params, c, n);
        const double expect = n == 0 ? 1.0 : (params.q + 1) * std::pow(params.q, n - 1);
        if (static_cast<double>(s.size()) != expect) ++bad;
        for (const auto& x : s) {
          if (distance(c, x) != n) ++bad;
        }
      }
    }
    return bad;
  });
}

void boundary_checks(Suite& suite, const TreeParams& params) {
  const int q = params.q;
  suite.check("boundary: cylinder refinement additivity, depth <= 8 (exact)", 0, [&] {
    double bad = 0;
    if (cylinder_measure(q, 0) != Rational(1)) ++bad;
    if (cylinder_measure(q, 1) * (q + 1) != cylinder_measure(q, 0)) ++bad;
    for (int n = 1; n < 8; ++n) {
      if (cylinder_measure(q, n + 1) * q != cylinder_measure(q, n)) ++bad;
    }
    return bad;
  });
  suite.check("boundary: E-partition masses vs cylinder enumeration, |x| <= 4 (exact)", 0, [&] {
    double bad = 0;
    for (const auto& x : ball(params, Vertex{}, 4)) {
      const int d = static_cast<int>(x.length());
      const EPartition e = e_partition(params, x);
      std::vector<Rational> count(static_cast<std::size_t>(d) + 1, Rational(0));
      for (const auto& w : reduced_words(params, d)) {
        count[static_cast<std::size_t>(std::min(common_prefix(x.word, w), d))] +=
            cylinder_measure(q, d);
      }
      if (d == 0) count[0] = Rational(1);
      Rational total(0);
      for (std::size_t i = 0; i < e.masses.size(); ++i) total += e.masses[i];
      if (total != Rational(1) || e.masses != count) ++bad;
    }
    return bad;
  });
  suite.check("boundary: Radon-Nikodym total mass 1 for y in ball(o,3) (exact)", 0, [&] {
    double bad = 0;
    const Vertex o;
    for (const auto& y : ball(params, o, 3)) {
      const int depth = static_cast<int>(y.length());
      Rational total(0);
      for (const auto& w : reduced_words(params, depth)) {
        total += radon_nikodym(params, o, y, NbWord{o, w}) * cylinder_measure(q, depth);
      }
      if (total != Rational(1)) ++bad;
    }
    return bad;
  });
}

void spectral_checks(Suite& suite, const TreeParams& params, const SGrid& grid) {
  suite.check("spectral: |M_0 - 1|", 1e-12, [&] { return std::abs(grid.moment(0) - 1.0); });
  suite.check("spectral: moment annihilation, d = 1..6", 1e-10, [&] {
    double worst = 0.0;
    for (int d = 1; d <= 6; ++d) {
      const Vertex x{Word(reduced_words(params, d).front())};
      const EPartition e = e_partition(params, x);
      cplx sum = 0.0;
      for (int j = 0; j <= d; ++j) {
        const Rational& m = e.masses[static_cast<std::size_t>(j)];
        const double mass = static_cast<double>(m.numerator()) / static_cast<double>(m.denominator());
        sum += mass * std::pow(static_cast<double>(params.q), j - d / 2.0) * grid.moment(2 * j - d);
      }
      worst = std::max(worst, std::abs(sum));
    }
    return worst;
  });
  suite.check("spectral: spherical function explicit vs boundary integral, |x| <= 6", 1e-10, [&] {
    double worst = 0.0;
    const auto samples = uniform_s_samples(params, 64);
    for (int d = 0; d <= 6; ++d) {
      const Vertex x{Word(reduced_words(params, d).front())};
      for (double s : samples) {
        worst = std::max(worst, std::abs(spherical_explicit(s, d, params) -
                                         spherical_via_boundary(s, x, params)));
      }
    }
    return worst;
  });
}

void fourier_checks(Suite& suite, const TreeParams& params, const SGrid& grid, int radius,
                    std::uint64_t seed) {
  const int r = std::min(radius, 4);
  std::mt19937_64 rng(seed);
  std::vector<FiniteFunction> fs;
  for (int i = 0; i < 10; ++i) fs.push_back(random_function(params, r, rng));
  std::vector<SpectralFunction> transforms;
  for (const auto& f : fs) transforms.push_back(fh_forward(f, grid));

  suite.check("fourier: roundtrip sup error, 10 random f on ball(o," + std::to_string(r) + ")", 1e-8,
              [&] {
                double worst = 0.0;
                for (std::size_t i = 0; i < fs.size(); ++i) {
                  for (const auto& [x, v] : fs[i].support) {
                    worst = std::max(worst, std::abs(fh_inverse(transforms[i], grid, x) - v));
                  }
                }
                return worst;
              });
  suite.check("fourier: Plancherel inner products", 1e-8, [&] {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < fs.size(); i += 2) {
      for (std::size_t j : {i, i + 1}) {
        cplx direct = 0.0;
        for (std::size_t k = 0; k < fs[i].support.size(); ++k) {
          direct += fs[i].support[k].second * std::conj(fs[j].support[k].second);
        }
        worst = std::max(worst, std::abs(plancherel_inner(fs[i], fs[j], grid) - direct));
      }
    }
    return worst;
  });
  suite.check("fourier: symmetry condition residual", 1e-8, [&] {
    double worst = 0.0;
    for (const auto& F : transforms) {
      for (const auto& x : ball(params, Vertex{}, r)) worst = std::max(worst, symmetry_check(F, grid, x));
    }
    return worst;
  });
}

std::vector<std::pair<std::string, CylSymbol>> families(const TreeParams& params, const RunConfig& cfg) {
  FamilyParams fp;
  fp.epsilon = cfg.epsilon;
  fp.shift = cfg.shift;
  fp.chi_radius = cfg.chi_radius;
  std::vector<std::pair<std::string, CylSymbol>> out;
  for (FamilyKind k : {FamilyKind::bump_profile_only, FamilyKind::radial_eps, FamilyKind::shifted_k}) {
    out.emplace_back(family_name(k), builtin_family(k, params, fp));
  }
  return out;
}

void quantize_checks(Suite& suite, const TreeParams& params, const SGrid& grid, const RunConfig& cfg) {
  const int radius = cfg.radius;
  const std::string at_r = " at R=" + std::to_string(radius);
  suite.check("quantize: |Op(1) - I|_max" + at_r, 1e-10, [&] {
    return max_abs((kernel_of_symbol(constant_symbol(params, 1.0), radius, grid) -
                    identity_kernel(params, radius))
                       .entries);
  });
  suite.check("quantize: |Op(lambda) - Laplacian|_max" + at_r, 1e-10, [&] {
    return max_abs((kernel_of_symbol(profile_symbol(params, eigencurve_profile(params)), radius, grid) -
                    laplacian_kernel(params, radius))
                       .entries);
  });

  const auto fams = families(params, cfg);
  const int small = std::min(radius, 3);
  for (const auto& [name, a] : fams) {
    suite.check("quantize: grouped vs naive evaluator, " + name + ", R=" + std::to_string(small), 1e-12,
                [&, &a = a] {
                  return max_abs((kernel_of_symbol(a, small, grid, KernelMethod::grouped) -
                                  kernel_of_symbol(a, small, grid, KernelMethod::naive))
                                     .entries);
                });
    suite.check("quantize: reference-point invariance, " + name, 1e-12, [&, &a = a] {
      const SymbolKernel k(a, grid, 2 * small + 2);
      const Ball b(params, std::min(radius, 2));
      double worst = 0.0;
      for (const Vertex& ref : {Vertex{Word{0}}, Vertex{Word{1, 0}}}) {
        for (const auto& x : b.vertices()) {
          for (const auto& y : b.vertices()) {
            worst = std::max(worst, std::abs(k.entry(x, y) - k.entry_from_reference(x, y, ref)));
          }
        }
      }
      return worst;
    });
  }

  const KernelMatrix lap = laplacian_kernel(params, radius);
  for (const auto& [name, a] : fams) {
    suite.check("quantize: commutator identity, " + name + ", inner ball R=" + std::to_string(radius - 1),
                1e-10, [&, &a = a] {
                  const KernelMatrix k = kernel_of_symbol(a, radius, grid);
                  KernelMatrix comm = product(lap, k);
                  comm.entries -= k.entries * lap.entries;
                  const KernelMatrix inner = restrict_kernel(comm, radius - 1);
                  return max_abs(inner.entries -
                                 kernel_of_symbol(commutator_symbol(a), radius - 1, grid).entries);
                });
  }

  suite.check("quantize: Laplacian norm <= 2 sqrt(q)/(q+1)" + at_r, 1e-8, [&] {
    const double full = 2.0 * std::sqrt(static_cast<double>(params.q)) / (params.q + 1);
    return std::max(0.0, opnorm_estimate(lap).norm - full);
  });

  for (const auto& [name, a] : fams) {
    suite.check("quantize: decay profile C_4 finite, " + name + at_r, 0.0, [&, &a = a] {
      const DecayProfile p = decay_profile(kernel_of_symbol(a, radius, grid));
      return std::isfinite(p.constants[4]) ? 0.0 : kInf;
    });
  }
}

void closure_checks(Suite& suite, const TreeParams& params, const RunConfig& cfg) {
  FamilyParams fp;
  fp.epsilon = cfg.epsilon;
  fp.chi_radius = cfg.chi_radius;
  const CylSymbol a = builtin_family(FamilyKind::radial_eps, params, fp);
  ValidateOptions opts;
  opts.test_radius = 2;
  opts.epsilon = cfg.epsilon;
  opts.s_samples = 9;
  opts.max_cross_order = 0;
  // sigma and L read a one step further out, so Lip(a) is measured on the
  // ball of radius one larger.
  ValidateOptions outer = opts;
  outer.test_radius = opts.test_radius + 1;
  const SClassReport ra = validate_class(a, outer);

  suite.check("symbols: Lip(a o sigma) - Lip(a), radial_eps", 1e-12, [&] {
    return validate_class(shift_compose(a), opts).lipschitz_x[0] - ra.lipschitz_x[0];
  });
  suite.check("symbols: Lip(La) - 3 Lip(a), radial_eps", 1e-12, [&] {
    return validate_class(transfer_L(a), opts).lipschitz_x[0] - 3.0 * ra.lipschitz_x[0];
  });
  suite.check("symbols: |L(a o sigma) - a|_max, radial_eps", 1e-14, [&] {
    const CylSymbol back = transfer_L(shift_compose(a));
    double worst = 0.0;
    const auto samples = uniform_s_samples(params, 5);
    for (const auto& x : ball(params, Vertex{}, 2)) {
      for (const auto& w : reduced_words(params, back.depth)) {
        for (double s : samples) worst = std::max(worst, std::abs(eval(back, x, w, s) - eval(a, x, w, s)));
      }
    }
    return worst;
  });
}

}  // namespace

bool VerifyReport::all_pass() const {
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

const CheckRow* VerifyReport::find(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name.rfind(name, 0) == 0) return &r;
  }
  return nullptr;
}

VerifyReport run_verify(const RunConfig& cfg) {
  VerifyReport report;
  Suite suite(report);
  const TreeParams params = TreeParams::make(cfg.q);
  tree_checks(suite, params, cfg.radius);
  boundary_checks(suite, params);
  const SGrid grid = build_grid(params, cfg.snodes);
  spectral_checks(suite, params, grid);
  fourier_checks(suite, params, grid, cfg.radius, cfg.seed);
  quantize_checks(suite, params, grid, cfg);
  closure_checks(suite, params, cfg);
  return report;
}

void print_report(std::ostream& out, const VerifyReport& report) {
  char buf[64];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-4s  %11.3e  <= %9.2e  %7.2fs  ", r.pass ? "PASS" : "FAIL",
                  r.measured, r.tolerance, r.seconds);
    out << buf << r.name << '\n';
  }
  std::size_t failed = 0;
  for (const auto& r : report.rows) failed += r.pass ? 0 : 1;
  out << (failed == 0 ? "all " + std::to_string(report.rows.size()) + " checks passed"
                      : std::to_string(failed) + " of " + std::to_string(report.rows.size()) +
                            " checks failed")
      << '\n';
}

}  // namespace treepsi
