#pragma once

// Boundary combinatorics: cylinder measures, confluence depths, height
// differences, the E_i(x) partition, Radon-Nikodym derivatives and the
// conditional averages over cylinders. Measures are exact rationals.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "treepsi/tree.hpp"

namespace treepsi {

using Rational = boost::rational<std::int64_t>;

/// q^e as an exact rational; e may be negative.
Rational rational_power(int q, int e);

/// nu_x of a depth-n cylinder at x: 1 for n = 0, 1/((q+1) q^(n-1)) otherwise.
Rational cylinder_measure(int q, int depth);
double cylinder_measure_value(int q, int depth);

/// Length of the shared initial segment of the ray named by w (based at x)
/// and the geodesic [x, y]. Throws DomainError if the stub is shorter than
/// d(x, y), and std::invalid_argument if w is not based at x.
int confluence_depth(const Vertex& x, const Vertex& y, const NbWord& w);

/// h_omega(y) - h_omega(x) = 2 * confluence_depth - d(x, y).
int height_diff(const Vertex& x, const Vertex& y, const NbWord& w);

/// Same as height_diff but on a precomputed path word x -> y and a stub from
/// x; no validation. Hot path for kernel assembly.
inline int height_diff_raw(std::span<const Color> path, std::span<const Color> stub) {
  const int d = static_cast<int>(path.size());
  int j = common_prefix(path, stub);
  if (j > d) j = d;
  return 2 * j - d;
}

struct EPartition {
  Vertex base;
  std::vector<Rational> masses;  // nu(E_i(x)), i = 0..|x|
};

EPartition e_partition(const TreeParams& params, const Vertex& x);

/// d nu_y / d nu_x on the cylinder named by w, i.e. q^height_diff.
Rational radon_nikodym(const TreeParams& params, const Vertex& x, const Vertex& y,
                       const NbWord& w);

/// Ray from `from` toward the boundary point named by (base, stub). The
/// returned prefix is determined by the stub; its length is at least
/// |stub| - d(from, base).
Word ray_from(const Vertex& from, const Vertex& base, std::span<const Color> stub);

/// Conditional nu_base average over the depth-n cylinder at `base` containing
/// omega, of omega -> f(y, omega) where f depends on the first `depth` letters
/// of the ray from y. omega is given by `stub_from_y`, which must be at least
/// n + d(base, y) long. Returns 0 for n < 0.
///
/// `f` is invoked with a stub from y of exactly `depth` letters.
template <class T, class F>
T cylinder_average(const TreeParams& params, const Vertex& base, int n,
                   const Vertex& y, std::span<const Color> stub_from_y, int depth,
                   F&& f);

namespace detail {
void extend_reduced(const TreeParams& params, Word& prefix, int remaining,
                    std::vector<Word>& out);
}

template <class T, class F>
T cylinder_average(const TreeParams& params, const Vertex& base, int n,
                   const Vertex& y, std::span<const Color> stub_from_y, int depth,
                   F&& f) {
  if (n < 0) return T(0);
  const Word up = path_word(base, y);
  const int d = static_cast<int>(up.size());
  const Word ray_base = reduce_concat(up, stub_from_y);
  if (static_cast<int>(ray_base.size()) < n) {
    throw DomainError("cylinder_average: stub does not determine the depth-n cylinder");
  }
  const int refine = std::max(n, depth + d);
  Word prefix(ray_base.begin(), ray_base.begin() + n);
  std::vector<Word> cells;
  detail::extend_reduced(params, prefix, refine - n, cells);
  const Word down = reversed(up);
  T sum(0);
  for (const Word& cell : cells) {
    Word from_y = reduce_concat(down, cell);
    from_y.resize(static_cast<std::size_t>(depth));
    sum += f(std::span<const Color>(from_y));
  }
  return sum / T(static_cast<std::int64_t>(cells.size()));
}

}  // namespace treepsi
