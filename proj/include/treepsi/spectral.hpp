#pragma once

// Spectral side of the tree: Harish-Chandra c-function, Plancherel density
// on [0, tau], the Gauss-Legendre grid with its integer-exponent moments,
// spherical functions and the Laplacian eigenvalue curve.

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "treepsi/tree.hpp"

namespace treepsi {

using cplx = std::complex<double>;

/// Neumaier-compensated accumulator; summation order is the call order.
class CompensatedSum {
public:
  void add(cplx v) {
    add_part(re_, cre_, v.real());
    add_part(im_, cim_, v.imag());
  }
  cplx value() const { return {re_ + cre_, im_ + cim_}; }

private:
  static void add_part(double& sum, double& comp, double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) comp += (sum - t) + v;
    else comp += (v - t) + sum;
    sum = t;
  }
  double re_ = 0.0, cre_ = 0.0, im_ = 0.0, cim_ = 0.0;
};

/// |c(s)|^{-2} on [0, tau]; vanishes at both endpoints.
double c_abs_inv_sq(double s, const TreeParams& params);

/// c(z) for real z off the lattice tau Z.
cplx c_function(double s, const TreeParams& params);

/// c_P = q ln q / (4 pi (q + 1)).
double plancherel_constant(const TreeParams& params);

/// Density of the Plancherel measure folded onto [0, tau]: 2 c_P |c(s)|^{-2}.
double plancherel_density(double s, const TreeParams& params);

/// lambda(s) = 2 sqrt(q) cos(s ln q) / (q + 1).
double laplacian_eigencurve(double s, const TreeParams& params);

/// phi_s at radius d from the closed form (lattice cases at s = 0, tau).
double spherical_explicit(double s, int d, const TreeParams& params);

/// phi_s(x) from the boundary integral over the E_j(x) partition.
double spherical_via_boundary(double s, const Vertex& x, const TreeParams& params);

struct GaussRule {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

/// Quadrature grid for the Plancherel measure on [0, tau]: nodes s_k, weights
/// w_k with the density folded in, and a lazily filled cache of
/// M_m = sum_k w_k q^{i m s_k}.
class SGrid {
public:
  SGrid(const TreeParams& params, std::vector<double> nodes, std::vector<double> weights);

  SGrid(const SGrid& other);
  SGrid& operator=(const SGrid&) = delete;

  const TreeParams& params() const { return params_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double node(std::size_t k) const { return nodes_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }
  std::string id() const;

  /// M_m; safe to call concurrently.
  cplx moment(int m) const;

  /// sum_k w_k q^{i h s_k} f_k for a table f_k over the nodes.
  cplx weighted_sum(int h, const std::vector<cplx>& values) const;

private:
  TreeParams params_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  mutable std::mutex mutex_;
  mutable std::map<int, cplx> moments_;
};

inline constexpr int kMinGridNodes = 8;
inline constexpr int kDefaultGridNodes = 256;

/// Gauss-Legendre grid against the folded Plancherel density. Throws
/// std::invalid_argument for n_nodes < 8.
SGrid build_grid(const TreeParams& params, int n_nodes = kDefaultGridNodes);

/// n equally spaced points on [0, tau] including both endpoints.
std::vector<double> uniform_s_samples(const TreeParams& params, int n);

}  // namespace treepsi
