#include "treepsi/fourier_helgason.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "treepsi/boundary.hpp"

namespace treepsi {

int FiniteFunction::max_radius() const {
  int r = 0;
  for (const auto& [v, value] : support) r = std::max(r, static_cast<int>(v.length()));
  return r;
}

void FiniteFunction::validate() const {
  std::set<Word> seen;
  for (const auto& [v, value] : support) {
    if (!seen.insert(v.word).second) {
      throw std::invalid_argument("FiniteFunction: duplicate vertex " + v.str());
    }
  }
}

SpectralFunction fh_forward(const FiniteFunction& f, const SGrid& grid, int depth) {
  f.validate();
  const int needed = f.max_radius();
  if (depth < 0) depth = needed;
  if (depth < needed) {
    throw DomainError("fh_forward: depth " + std::to_string(depth) +
                      " cannot represent support of radius " + std::to_string(needed));
  }
  const TreeParams& params = grid.params();
  const double lq = params.log_q();
  const std::size_t n = grid.size();

  SpectralFunction F;
  F.depth = depth;
  F.n_nodes = n;
  F.stubs = reduced_words(params, depth);
  F.table.assign(F.stubs.size() * n, 0.0);
  std::vector<cplx> refl(F.stubs.size() * n, 0.0);

  for (std::size_t c = 0; c < F.stubs.size(); ++c) {
    for (std::size_t k = 0; k < n; ++k) {
      CompensatedSum fwd, back;
      for (const auto& [y, value] : f.support) {
        const int h = height_diff_raw(y.word, F.stubs[c]);
        const double mag = std::pow(static_cast<double>(params.q), 0.5 * h);
        const double phase = h * grid.node(k) * lq;
        fwd.add(value * std::polar(mag, phase));
        back.add(value * std::polar(mag, -phase));
      }
      F.table[c * n + k] = fwd.value();
      refl[c * n + k] = back.value();
    }
  }
  F.reflected = std::move(refl);
  return F;
}

cplx fh_inverse(const SpectralFunction& F, const SGrid& grid, const Vertex& x) {
  if (static_cast<int>(x.length()) > F.depth) {
    throw DomainError("fh_inverse: |x| exceeds the depth of the spectral table");
  }
  const TreeParams& params = grid.params();
  const double lq = params.log_q();
  const double nu = cylinder_measure_value(params.q, F.depth);
  CompensatedSum total;
  for (std::size_t c = 0; c < F.stubs.size(); ++c) {
    const int h = height_diff_raw(x.word, F.stubs[c]);
    const double mag = std::pow(static_cast<double>(params.q), 0.5 * h);
    CompensatedSum inner;
    for (std::size_t k = 0; k < F.n_nodes; ++k) {
      inner.add(grid.weight(k) * std::polar(mag, -h * grid.node(k) * lq) * F.at(c, k));
    }
    total.add(nu * inner.value());
  }
  return total.value();
}

cplx plancherel_inner(const FiniteFunction& f, const FiniteFunction& g, const SGrid& grid) {
  const int depth = std::max(f.max_radius(), g.max_radius());
  const SpectralFunction F = fh_forward(f, grid, depth);
  const SpectralFunction G = fh_forward(g, grid, depth);
  const double nu = cylinder_measure_value(grid.params().q, depth);
  CompensatedSum total;
  for (std::size_t c = 0; c < F.stubs.size(); ++c) {
    CompensatedSum inner;
    for (std::size_t k = 0; k < F.n_nodes; ++k) {
      inner.add(grid.weight(k) * F.at(c, k) * std::conj(G.at(c, k)));
    }
    total.add(nu * inner.value());
  }
  return total.value();
}

double symmetry_check(const SpectralFunction& F, const SGrid& grid, const Vertex& x) {
  if (!F.reflected) {
    throw std::invalid_argument("symmetry_check: spectral function carries no values at -s");
  }
  if (static_cast<int>(x.length()) > F.depth) {
    throw DomainError("symmetry_check: |x| exceeds the depth of the spectral table");
  }
  const TreeParams& params = grid.params();
  const double lq = params.log_q();
  const double nu = cylinder_measure_value(params.q, F.depth);
  const auto& refl = *F.reflected;
  double worst = 0.0;
  for (std::size_t k = 0; k < F.n_nodes; ++k) {
    CompensatedSum lhs, rhs;
    for (std::size_t c = 0; c < F.stubs.size(); ++c) {
      const int h = height_diff_raw(x.word, F.stubs[c]);
      const double mag = std::pow(static_cast<double>(params.q), 0.5 * h);
      const double phase = h * grid.node(k) * lq;
      lhs.add(nu * std::polar(mag, -phase) * F.at(c, k));
      rhs.add(nu * std::polar(mag, phase) * refl[c * F.n_nodes + k]);
    }
    worst = std::max(worst, std::abs(lhs.value() - rhs.value()));
  }
  return worst;
}

}  // namespace treepsi
