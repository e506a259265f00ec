#pragma once

// Kernels of quantized symbols on a finite ball: Op(a), OP(c), the Laplacian
// and the identity, stored as dense complex matrices over ball(o, R).

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "treepsi/spectral.hpp"
#include "treepsi/symbols.hpp"
#include "treepsi/tree.hpp"

namespace treepsi {

struct KernelMatrix {
  BallPtr ball;
  int q = 2;
  std::string grid_id;  // "exact" for kernels known in closed form
  std::string source;
  int symbol_depth = 0;
  /// Largest distance with nonzero entries when known exactly, else -1.
  int known_range = -1;
  Eigen::MatrixXcd entries;

  int radius() const { return ball->radius(); }
  std::size_t size() const { return ball->size(); }
  /// Entry for two vertices of the ball; throws DomainError otherwise.
  cplx at(const Vertex& x, const Vertex& y) const;
};

/// sum_k w_k q^{i h s_k} eta(s_k) for every profile of a symbol, cached for
/// |h| <= max_height. Immutable after construction.
class ProfileMoments {
public:
  ProfileMoments(const std::vector<SProfile>& profiles, const SGrid& grid, int max_height);

  cplx operator()(std::size_t term, int h) const;
  std::size_t terms() const { return values_.size(); }

private:
  SGrid grid_;
  int max_height_;
  std::vector<std::vector<cplx>> at_nodes_;  // [term][node]
  std::vector<std::vector<cplx>> values_;    // [term][h + max_height]
};

/// Entry-wise evaluator of k_a(x, y) for arbitrary pairs in the symbol
/// domain. The omega integral is exact: cylinders are grouped by their
/// first m letters and the confluence depth, with closed-form masses.
class SymbolKernel {
public:
  SymbolKernel(CylSymbol a, const SGrid& grid, int max_height = 32);

  /// g_i(x, p) over the lexicographic depth-m stubs p: table[p][i].
  using SpatialTable = std::vector<std::vector<cplx>>;
  SpatialTable spatial_table(const Vertex& x) const;

  cplx entry(const Vertex& x, const Vertex& y) const;
  cplx entry(const Vertex& x, const Vertex& y, const SpatialTable& gx) const;

  /// Oracle: sums over every depth-max(m, d) cylinder at x individually.
  cplx entry_naive(const Vertex& x, const Vertex& y,
                   std::size_t cap = kDefaultEnumerationCap) const;

  /// Oracle: integrates against nu_ref with the Radon-Nikodym factor instead
  /// of against nu_x.
  cplx entry_from_reference(const Vertex& x, const Vertex& y, const Vertex& ref,
                            std::size_t cap = kDefaultEnumerationCap) const;

  const CylSymbol& symbol() const { return a_; }
  const ProfileMoments& moments() const { return moments_; }

private:
  CylSymbol a_;
  std::vector<Word> stubs_;
  ProfileMoments moments_;
};

enum class KernelMethod { grouped, naive };

/// k_a on ball(o, R). Throws DomainError if the symbol is not defined on the
/// whole ball and CapExceeded if the naive enumeration would be too large.
KernelMatrix kernel_of_symbol(const CylSymbol& a, int radius, const SGrid& grid,
                              KernelMethod method = KernelMethod::grouped);

/// K_c on ball(o, R) by cylinder enumeration at depth max(stub depth, d).
KernelMatrix kernel_of_double(const DoubleSymbol& c, int radius, const SGrid& grid,
                              std::size_t cap = kDefaultEnumerationCap);

KernelMatrix laplacian_kernel(const TreeParams& params, int radius);
KernelMatrix identity_kernel(const TreeParams& params, int radius);
KernelMatrix zero_kernel(const TreeParams& params, int radius);

/// Same kernel on the smaller ball(o, inner_radius).
KernelMatrix restrict_kernel(const KernelMatrix& a, int inner_radius);

/// Conjugate transpose.
KernelMatrix adjoint_kernel(const KernelMatrix& a);

KernelMatrix operator-(const KernelMatrix& a, const KernelMatrix& b);

}  // namespace treepsi
