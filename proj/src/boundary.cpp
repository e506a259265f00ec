#include "treepsi/boundary.hpp"

#include <cmath>
#include <stdexcept>

namespace treepsi {

namespace detail {
void extend_reduced(const TreeParams& params, Word& prefix, int remaining,
                    std::vector<Word>& out) {
  if (remaining == 0) {
    out.push_back(prefix);
    return;
  }
  for (int c = 0; c <= params.q; ++c) {
    if (!prefix.empty() && prefix.back() == c) continue;
    prefix.push_back(static_cast<Color>(c));
    extend_reduced(params, prefix, remaining - 1, out);
    prefix.pop_back();
  }
}
}  // namespace detail

Rational rational_power(int q, int e) {
  std::int64_t p = 1;
  for (int i = 0; i < std::abs(e); ++i) p *= q;
  return e >= 0 ? Rational(p) : Rational(1, p);
}

Rational cylinder_measure(int q, int depth) {
  if (depth < 0) throw std::invalid_argument("cylinder depth must be nonnegative");
  if (depth == 0) return Rational(1);
  return Rational(1, (q + 1)) * rational_power(q, -(depth - 1));
}

double cylinder_measure_value(int q, int depth) {
  if (depth == 0) return 1.0;
  return 1.0 / ((q + 1) * std::pow(static_cast<double>(q), depth - 1));
}

int confluence_depth(const Vertex& x, const Vertex& y, const NbWord& w) {
  if (w.base != x) throw std::invalid_argument("confluence_depth: stub is not based at x");
  const Word path = path_word(x, y);
  if (w.stub.size() < path.size()) {
    throw DomainError("confluence_depth: stub shorter than d(x,y) does not fix the "
                      "confluence point");
  }
  return common_prefix(path, w.stub);
}

int height_diff(const Vertex& x, const Vertex& y, const NbWord& w) {
  return 2 * confluence_depth(x, y, w) - distance(x, y);
}

EPartition e_partition(const TreeParams& params, const Vertex& x) {
  const int n = static_cast<int>(x.length());
  const int q = params.q;
  EPartition part{x, std::vector<Rational>(static_cast<std::size_t>(n) + 1)};
  if (n == 0) {
    part.masses[0] = Rational(1);
    return part;
  }
  part.masses[0] = Rational(q, q + 1);
  for (int i = 1; i < n; ++i) {
    part.masses[static_cast<std::size_t>(i)] =
        Rational(q - 1, q + 1) * rational_power(q, -i);
  }
  part.masses[static_cast<std::size_t>(n)] = Rational(q, q + 1) * rational_power(q, -n);
  return part;
}

Rational radon_nikodym(const TreeParams& params, const Vertex& x, const Vertex& y,
                       const NbWord& w) {
  return rational_power(params.q, height_diff(x, y, w));
}

Word ray_from(const Vertex& from, const Vertex& base, std::span<const Color> stub) {
  return reduce_concat(path_word(from, base), stub);
}

}  // namespace treepsi
