#pragma once

// Fourier-Helgason transform of finitely supported functions, its inverse,
// the Plancherel pairing and the symmetry-condition residual.

#include <optional>
#include <utility>
#include <vector>

#include "treepsi/spectral.hpp"
#include "treepsi/tree.hpp"

namespace treepsi {

/// Finitely supported function on the tree; vertices must be distinct.
struct FiniteFunction {
  std::vector<std::pair<Vertex, cplx>> support;

  int max_radius() const;
  /// Throws std::invalid_argument on duplicate vertices.
  void validate() const;
};

/// Values of a transform on (depth-D cylinder at o) x (grid node).
struct SpectralFunction {
  int depth = 0;
  std::size_t n_nodes = 0;
  std::vector<Word> stubs;  // lexicographic depth-D stubs at o
  std::vector<cplx> table;  // table[stub * n_nodes + node]
  /// Same table evaluated at -s_k, when known from the source function.
  std::optional<std::vector<cplx>> reflected;

  cplx& at(std::size_t stub, std::size_t node) { return table[stub * n_nodes + node]; }
  cplx at(std::size_t stub, std::size_t node) const { return table[stub * n_nodes + node]; }
};

/// Forward transform. `depth` < 0 selects the minimal depth max |x| over the
/// support; a smaller explicit depth throws DomainError.
SpectralFunction fh_forward(const FiniteFunction& f, const SGrid& grid, int depth = -1);

/// Inverse transform evaluated at x; throws DomainError for |x| > F.depth.
cplx fh_inverse(const SpectralFunction& F, const SGrid& grid, const Vertex& x);

/// Spectral-side pairing <f^, g^> in L^2(Omega x [0, tau], nu x mu).
cplx plancherel_inner(const FiniteFunction& f, const FiniteFunction& g, const SGrid& grid);

/// Max over nodes of the symmetry-condition residual at x. Requires
/// F.reflected; throws std::invalid_argument otherwise.
double symmetry_check(const SpectralFunction& F, const SGrid& grid, const Vertex& x);

}  // namespace treepsi
