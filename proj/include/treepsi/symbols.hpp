#pragma once

// Cylindrical symbols a(x, omega, s) = sum_i g_i(x, first m steps of [x, omega)) * eta_i(s),
// their algebra (product, shift, transfer, conjugation, conditional
// averages) and the class-membership validator.

#include <array>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "treepsi/jet.hpp"
#include "treepsi/spectral.hpp"
#include "treepsi/tree.hpp"

namespace treepsi {

/// A function of the spectral parameter with exact derivatives up to
/// kMaxDerivative, supplied as a Taylor jet at each point.
struct SProfile {
  std::string name;
  std::function<Jet(double)> jet;
  bool endpoint_flat = false;

  cplx value(double s) const { return jet(s).value(); }
  /// Throws std::invalid_argument for k outside [0, kMaxDerivative].
  cplx derivative(double s, int k) const;
};

SProfile constant_profile(cplx value);
/// exp(-1 / (u (1 - u))) with u = s / tau; vanishes to all orders at 0 and tau.
SProfile bump_profile(const TreeParams& params);
/// Laplacian eigenvalue curve lambda(s).
SProfile eigencurve_profile(const TreeParams& params);
/// exp(i * omega * s).
SProfile exp_i_profile(double omega);
SProfile operator*(const SProfile& a, const SProfile& b);
SProfile conj(const SProfile& p);
/// Looks up "one", "bump" or "eigencurve"; throws std::invalid_argument otherwise.
SProfile named_profile(const std::string& name, const TreeParams& params);

/// Spatial factor g(x, stub); the stub always has exactly the symbol depth.
using SpatialFn = std::function<cplx(const Vertex&, std::span<const Color>)>;

struct SymbolTerm {
  SpatialFn spatial;
  SProfile profile;
};

inline constexpr int kUnboundedRadius = std::numeric_limits<int>::max();

struct CylSymbol {
  TreeParams params;
  int depth = 0;
  int domain_radius = kUnboundedRadius;
  std::vector<SymbolTerm> terms;
  std::string description;

  bool covers_radius(int r) const { return r <= domain_radius; }
  bool contains(const Vertex& x) const {
    return x.length() <= static_cast<std::size_t>(domain_radius);
  }
};

/// Symbol of one term with no spatial dependence.
CylSymbol profile_symbol(const TreeParams& params, SProfile profile);
CylSymbol constant_symbol(const TreeParams& params, cplx value);
/// Depth-0 symbol g(x) * profile.
CylSymbol radial_symbol(const TreeParams& params, std::function<cplx(const Vertex&)> g,
                        SProfile profile, std::string description);

/// a(x, w, s) using the first depth(a) letters of w. Throws DomainError when
/// x is outside the domain or w is too short.
cplx eval(const CylSymbol& a, const Vertex& x, std::span<const Color> w, double s);
/// k-th s-derivative; throws std::invalid_argument for k > kMaxDerivative.
cplx eval_ds(const CylSymbol& a, const Vertex& x, std::span<const Color> w, double s, int k);

CylSymbol operator+(const CylSymbol& a, const CylSymbol& b);
CylSymbol operator*(cplx c, const CylSymbol& a);
CylSymbol multiply(const CylSymbol& a, const CylSymbol& b);
CylSymbol conj(const CylSymbol& a);
/// Multiplies every profile by p.
CylSymbol scale_profiles(const CylSymbol& a, const SProfile& p);

/// (a o sigma)(x, w, s) = a(x w_1, w_2..w_{m+1}, s).
CylSymbol shift_compose(const CylSymbol& a);
/// Transfer operator: average of a over the q neighbours of x away from omega.
CylSymbol transfer_L(const CylSymbol& a);

/// E^x_n a evaluated at its own spatial argument; the zero symbol for n < 0.
CylSymbol average_En(const CylSymbol& a, int n);
/// E^base_n a as a function of every spatial argument y with |y| <= out_radius.
CylSymbol average_En(const CylSymbol& a, int n, const Vertex& base, int out_radius);

/// Symbol depending on (x, y, omega, s); omega is seen through a stub from x
/// of length depth, plus d(x, y) extra letters when extends_with_distance.
struct DoubleSymbol {
  using Fn = std::function<cplx(const Vertex&, const Vertex&, std::span<const Color>)>;
  struct Term {
    Fn spatial;
    SProfile profile;
  };

  TreeParams params;
  int depth = 0;
  bool extends_with_distance = false;
  std::vector<Term> terms;
  std::string description;

  int stub_depth(int distance) const { return depth + (extends_with_distance ? distance : 0); }
};

/// c(x, y, omega, s) = a(x, omega, s).
DoubleSymbol left_double(const CylSymbol& a);
/// c(x, y, omega, s) = b(y, omega, s).
DoubleSymbol right_double(const CylSymbol& b);

cplx eval_double(const DoubleSymbol& c, const Vertex& x, const Vertex& y,
                 std::span<const Color> w, double s);

struct SClassReport {
  int depth = 0;
  int test_radius = 0;
  std::array<double, kMaxDerivative + 1> sup_norms{};
  /// sup_x sup_n (n+1)^N ||(a - E^x_n a)(x, ., .)||_inf.
  std::array<double, kMaxDerivative + 1> omega_norm{};
  /// Max |(a - E^x_n a)(x, ., .)| per n, n = 0..depth+2.
  std::vector<double> omega_residual;
  std::array<double, kMaxDerivative + 1> lipschitz_x{};
  /// Max |d^k a(., ., 0)|, |d^k a(., ., tau)| over k <= kMaxDerivative.
  double endpoint_max = 0.0;
  /// cross_constants[l][t]: empirical C_l(t) / eps, t = d(x, y).
  std::vector<std::vector<double>> cross_constants;
};

struct ValidateOptions {
  int test_radius = 3;
  double epsilon = 1.0;
  int s_samples = 33;
  int max_cross_order = 3;
};

SClassReport validate_class(const CylSymbol& a, const ValidateOptions& options = {});

enum class FamilyKind { bump_profile_only, radial_eps, shifted_k };

struct FamilyParams {
  double epsilon = 0.1;
  int shift = 1;
  double chi_radius = 4.0;
};

FamilyKind parse_family(const std::string& name);
std::string family_name(FamilyKind kind);
CylSymbol builtin_family(FamilyKind kind, const TreeParams& params, const FamilyParams& fp = {});

/// Cutoff used by radial_eps: chi(t) = psi((t + rho/2) / rho) with
/// psi(u) = exp(1 - 1/(1 - u^2)) on |u| < 1. Smooth, decreasing on
/// [0, rho/2), zero beyond, with Lipschitz constant about 2.2 / rho.
double radial_cutoff(double t, double rho);

/// Reads `x_word,stub,term_index,re,im` rows. Every (x, stub) over
/// ball(o, radius) x depth-m stubs must be present for each term, where
/// radius and m are read off the table. Throws std::invalid_argument on a
/// malformed or incomplete table.
CylSymbol load_symbol_csv(std::istream& in, const TreeParams& params,
                          const std::vector<SProfile>& profiles);

}  // namespace treepsi
