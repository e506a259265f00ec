#pragma once

// Operations on kernels: truncated composition with a certified tail,
// decay profiles, operator-norm estimates, the commutator symbol and the
// a#b symbol of a composition.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "treepsi/kernel.hpp"

namespace treepsi {

inline constexpr int kDecayOrders = 5;  // C_N for N = 0..4

struct DecayProfile {
  /// max |k(x, y)| over pairs at distance d, d = 0..2R.
  std::vector<double> max_abs;
  /// Smallest C_N with |k| <= C_N q^{-d/2} (1+d)^{-N} on the ball.
  std::array<double, kDecayOrders> constants{};
  /// ||a||_{Omega,N} + sum_{k <= N+1} ||d_s^k a||_inf when a report is given.
  std::optional<std::array<double, kDecayOrders>> predicted_shape;
  bool flagged = false;
};

/// Decay constants of a kernel. With a symbol report, flags any C_N larger
/// than `factor` times the predicted shape.
DecayProfile decay_profile(const KernelMatrix& a, const SClassReport* report = nullptr,
                           double factor = 1.0);

/// Per-N constants C_N(eps) of a remainder kernel; same definition as the
/// decay constants.
std::array<double, kDecayOrders> negligibility_report(const KernelMatrix& a);

struct TailBound {
  int tail_radius = 0;
  /// Bound on the dropped part of each entry, by distance d(x, y).
  std::vector<double> per_distance;
  double bound = 0.0;
};

struct Composition {
  KernelMatrix kernel;  // on the inner ball of radius R - T
  TailBound tail;
};

/// sum over z in ball(o, R) of A(x, z) B(z, y) for x, y in ball(o, R - T).
/// The dropped z satisfy d(x, z), d(z, y) > T; their contribution is bounded
/// by the operands' C_3 constants times the Schur series. Throws
/// std::invalid_argument on mismatched operands or T outside [0, R].
Composition compose_kernels(const KernelMatrix& a, const KernelMatrix& b, int tail_radius);

/// S(D, T) = sum over z with d(x, z) > T and d(z, y) > T of
/// q^{-n} (1 + d(x, z))^{-3} (1 + d(z, y))^{-3}, where d(x, y) = D and n is
/// the distance from z to the geodesic [x, y]. T < 0 drops the restriction.
/// Terms with n > n_max are bounded analytically when add_tail is set.
double schur_series(int q, int dist, int tail_radius, int n_max = 4000, bool add_tail = true);

/// sup_D (1 + D)^3 S(D, -1) over D <= max_dist: the composition constant of
/// C_3-decaying kernels.
double schur_lemma_constant(int q, int max_dist = 64);

struct NormEstimate {
  double norm = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

inline constexpr int kPowerIterations = 2000;
inline constexpr double kPowerTolerance = 1e-10;
inline constexpr std::uint64_t kDefaultSeed = 20240521;

/// sqrt of the top eigenvalue of A*A by power iteration from a seeded random
/// start; converged when successive Rayleigh quotients differ by at most
/// kPowerTolerance relative.
NormEstimate opnorm_estimate(const Eigen::MatrixXcd& a, int max_iters = kPowerIterations,
                             std::uint64_t seed = kDefaultSeed);
NormEstimate opnorm_estimate(const KernelMatrix& a, int max_iters = kPowerIterations,
                             std::uint64_t seed = kDefaultSeed);

/// Symbol of [Delta, Op(a)]:
/// sqrt(q)/(q+1) (q^{-is} (a o sigma - a) + q^{is} (La - a)).
CylSymbol commutator_symbol(const CylSymbol& a);

/// Tabulated a#b on the inner ball, one value per (vertex, stub, grid node).
struct SharpProduct {
  BallPtr ball;
  int depth = 0;
  std::vector<Word> stubs;
  std::size_t n_nodes = 0;
  std::vector<cplx> values;
  TailBound tail;

  cplx at(std::size_t x, std::size_t stub, std::size_t node) const {
    return values[(x * stubs.size() + stub) * n_nodes + node];
  }
};

/// a#b(x, w, s_k) = sum over y in ball(x, T) of
/// k_a(x, y) q^{(1/2 - i s_k)(h(y) - h(x))} b(y, w, s_k), for x in
/// ball(o, R - T) and stubs w of depth depth(b) + T. The tail bound uses the
/// C_4 constant of k_a on ball(o, R) and the sup of |b| observed there.
SharpProduct sharp_product_symbol(const CylSymbol& a, const CylSymbol& b, int radius,
                                  int tail_radius, const SGrid& grid);

/// Same sum with b frozen at x; reproduces a b up to the tail.
SharpProduct sharp_product_frozen(const CylSymbol& a, const CylSymbol& b, int radius,
                                  int tail_radius, const SGrid& grid);

}  // namespace treepsi
