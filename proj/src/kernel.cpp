#include "treepsi/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treepsi/boundary.hpp"

namespace treepsi {

cplx KernelMatrix::at(const Vertex& x, const Vertex& y) const {
  const auto i = ball->index_of(x);
  const auto j = ball->index_of(y);
  if (i < 0 || j < 0) throw DomainError("kernel entry requested outside its ball");
  return entries(i, j);
}

ProfileMoments::ProfileMoments(const std::vector<SProfile>& profiles, const SGrid& grid,
                               int max_height)
    : grid_(grid), max_height_(max_height) {
  at_nodes_.resize(profiles.size());
  values_.resize(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    at_nodes_[i].resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) at_nodes_[i][k] = profiles[i].value(grid.node(k));
    values_[i].resize(static_cast<std::size_t>(2 * max_height + 1));
    for (int h = -max_height; h <= max_height; ++h) {
      values_[i][static_cast<std::size_t>(h + max_height)] = grid.weighted_sum(h, at_nodes_[i]);
    }
  }
}

cplx ProfileMoments::operator()(std::size_t term, int h) const {
  if (std::abs(h) <= max_height_) return values_[term][static_cast<std::size_t>(h + max_height_)];
  return grid_.weighted_sum(h, at_nodes_[term]);
}

namespace {

std::vector<SProfile> profiles_of(const CylSymbol& a) {
  std::vector<SProfile> out;
  for (const auto& t : a.terms) out.push_back(t.profile);
  return out;
}

std::vector<SProfile> profiles_of(const DoubleSymbol& c) {
  std::vector<SProfile> out;
  for (const auto& t : c.terms) out.push_back(t.profile);
  return out;
}

double qpow(int q, double e) { return std::pow(static_cast<double>(q), e); }

/// q^{h/2} sum_i g_i P_i(h).
cplx cell_value(const ProfileMoments& moments, int q, int h, const std::vector<cplx>& g) {
  cplx sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] != cplx(0.0)) sum += g[i] * moments(i, h);
  }
  return qpow(q, 0.5 * h) * sum;
}

void check_domain(const CylSymbol& a, const Vertex& x) {
  if (!a.contains(x)) throw DomainError("vertex " + x.str() + " outside the symbol domain");
}

}  // namespace

SymbolKernel::SymbolKernel(CylSymbol a, const SGrid& grid, int max_height)
    : a_(std::move(a)),
      stubs_(reduced_words(a_.params, a_.depth)),
      moments_(profiles_of(a_), grid, max_height) {
  if (grid.params().q != a_.params.q) {
    throw std::invalid_argument("symbol and grid live on trees with different q");
  }
}

SymbolKernel::SpatialTable SymbolKernel::spatial_table(const Vertex& x) const {
  check_domain(a_, x);
  SpatialTable table(stubs_.size(), std::vector<cplx>(a_.terms.size()));
  for (std::size_t p = 0; p < stubs_.size(); ++p) {
    for (std::size_t i = 0; i < a_.terms.size(); ++i) table[p][i] = a_.terms[i].spatial(x, stubs_[p]);
  }
  return table;
}

cplx SymbolKernel::entry(const Vertex& x, const Vertex& y) const {
  return entry(x, y, spatial_table(x));
}

cplx SymbolKernel::entry(const Vertex& x, const Vertex& y, const SpatialTable& gx) const {
  const int q = a_.params.q;
  const int m = a_.depth;
  const Word u = path_word(x, y);
  const int d = static_cast<int>(u.size());
  const std::size_t terms = a_.terms.size();
  const double nu_m = cylinder_measure_value(q, m);

  // coeff[j]: sum over cylinders with confluence depth j of mass * g.
  std::vector<std::vector<cplx>> coeff(static_cast<std::size_t>(d + 1), std::vector<cplx>(terms));
  auto add = [&](int j, double mass, const std::vector<cplx>& g) {
    auto& c = coeff[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < terms; ++i) c[i] += mass * g[i];
  };

  for (std::size_t p = 0; p < stubs_.size(); ++p) {
    const Word& stub = stubs_[p];
    const int j0 = std::min(common_prefix(stub, u), d);
    if (m >= d || j0 < m) {
      add(j0, nu_m, gx[p]);
      continue;
    }
    // The stub runs along [x, y] for all of its m letters; split its mass by
    // where the ray leaves the geodesic.
    if (m == 0) {
      add(0, static_cast<double>(q) / (q + 1), gx[p]);
      for (int i = 1; i < d; ++i) add(i, (q - 1.0) / (q + 1) * qpow(q, -i), gx[p]);
      add(d, static_cast<double>(q) / (q + 1) * qpow(q, -d), gx[p]);
    } else {
      for (int i = m; i < d; ++i) add(i, nu_m * qpow(q, m - i) * (q - 1.0) / q, gx[p]);
      add(d, nu_m * qpow(q, m - d), gx[p]);
    }
  }

  CompensatedSum sum;
  for (int j = 0; j <= d; ++j) sum.add(cell_value(moments_, q, 2 * j - d, coeff[static_cast<std::size_t>(j)]));
  return sum.value();
}

cplx SymbolKernel::entry_naive(const Vertex& x, const Vertex& y, std::size_t cap) const {
  check_domain(a_, x);
  const int q = a_.params.q;
  const int m = a_.depth;
  const Word u = path_word(x, y);
  const int depth = std::max(m, static_cast<int>(u.size()));
  const double nu = cylinder_measure_value(q, depth);
  CompensatedSum sum;
  std::vector<cplx> g(a_.terms.size());
  for (const Word& w : reduced_words(a_.params, depth, cap)) {
    const auto stub = std::span(w).first(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = a_.terms[i].spatial(x, stub);
    sum.add(nu * cell_value(moments_, q, height_diff_raw(u, w), g));
  }
  return sum.value();
}

cplx SymbolKernel::entry_from_reference(const Vertex& x, const Vertex& y, const Vertex& ref,
                                        std::size_t cap) const {
  check_domain(a_, x);
  const int q = a_.params.q;
  const int m = a_.depth;
  const Word u = path_word(x, y);
  const Word to_x = path_word(ref, x);
  const int depth = std::max(m, static_cast<int>(u.size())) + static_cast<int>(to_x.size());
  const double nu = cylinder_measure_value(q, depth);
  CompensatedSum sum;
  std::vector<cplx> g(a_.terms.size());
  for (const Word& r : reduced_words(a_.params, depth, cap)) {
    const Word ray = ray_from(x, ref, r);
    const auto stub = std::span(ray).first(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = a_.terms[i].spatial(x, stub);
    const double rn = qpow(q, height_diff_raw(to_x, r));
    sum.add(nu * rn * cell_value(moments_, q, height_diff_raw(u, ray), g));
  }
  return sum.value();
}

namespace {

KernelMatrix blank_kernel(const TreeParams& params, int radius, std::string grid_id,
                          std::string source) {
  KernelMatrix k;
  k.ball = std::make_shared<const Ball>(params, radius);
  k.q = params.q;
  k.grid_id = std::move(grid_id);
  k.source = std::move(source);
  k.entries = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(k.ball->size()),
                                     static_cast<Eigen::Index>(k.ball->size()));
  return k;
}

}  // namespace

KernelMatrix kernel_of_symbol(const CylSymbol& a, int radius, const SGrid& grid,
                              KernelMethod method) {
  if (!a.covers_radius(radius)) {
    throw DomainError("kernel_of_symbol: symbol domain smaller than the ball");
  }
  KernelMatrix k = blank_kernel(a.params, radius, grid.id(), a.description);
  k.symbol_depth = a.depth;
  const SymbolKernel eval(a, grid, 2 * radius + 2);
  const auto& verts = k.ball->vertices();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (method == KernelMethod::grouped) {
      const auto gx = eval.spatial_table(verts[i]);
      for (std::size_t j = 0; j < verts.size(); ++j) k.entries(i, j) = eval.entry(verts[i], verts[j], gx);
    } else {
      for (std::size_t j = 0; j < verts.size(); ++j) k.entries(i, j) = eval.entry_naive(verts[i], verts[j]);
    }
  }
  return k;
}

KernelMatrix kernel_of_double(const DoubleSymbol& c, int radius, const SGrid& grid,
                              std::size_t cap) {
  KernelMatrix k = blank_kernel(c.params, radius, grid.id(), c.description);
  k.symbol_depth = c.depth;
  const ProfileMoments moments(profiles_of(c), grid, 2 * radius + 2);
  const int q = c.params.q;
  const auto& verts = k.ball->vertices();
  std::vector<cplx> g(c.terms.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    for (std::size_t j = 0; j < verts.size(); ++j) {
      const Word u = path_word(verts[i], verts[j]);
      const int d = static_cast<int>(u.size());
      const int need = c.stub_depth(d);
      const int depth = std::max(need, d);
      const double nu = cylinder_measure_value(q, depth);
      CompensatedSum sum;
      for (const Word& w : reduced_words(c.params, depth, cap)) {
        const auto stub = std::span(w).first(static_cast<std::size_t>(need));
        for (std::size_t t = 0; t < g.size(); ++t) g[t] = c.terms[t].spatial(verts[i], verts[j], stub);
        sum.add(nu * cell_value(moments, q, height_diff_raw(u, w), g));
      }
      k.entries(i, j) = sum.value();
    }
  }
  return k;
}

KernelMatrix laplacian_kernel(const TreeParams& params, int radius) {
  KernelMatrix k = blank_kernel(params, radius, "exact", "laplacian");
  k.known_range = 1;
  const auto& verts = k.ball->vertices();
  const double w = 1.0 / (params.q + 1);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    for (int c = 0; c <= params.q; ++c) {
      const auto j = k.ball->index_of(step(verts[i], static_cast<Color>(c)));
      if (j >= 0) k.entries(static_cast<Eigen::Index>(i), j) = w;
    }
  }
  return k;
}

KernelMatrix identity_kernel(const TreeParams& params, int radius) {
  KernelMatrix k = blank_kernel(params, radius, "exact", "identity");
  k.known_range = 0;
  k.entries.setIdentity();
  return k;
}

KernelMatrix zero_kernel(const TreeParams& params, int radius) {
  KernelMatrix k = blank_kernel(params, radius, "exact", "zero");
  k.known_range = 0;
  return k;
}

KernelMatrix restrict_kernel(const KernelMatrix& a, int inner_radius) {
  if (inner_radius < 0 || inner_radius > a.radius()) {
    throw std::invalid_argument("restrict_kernel: inner radius outside [0, R]");
  }
  KernelMatrix out = a;
  out.ball = std::make_shared<const Ball>(TreeParams::make(a.q), inner_radius);
  std::vector<Eigen::Index> idx;
  for (const Vertex& v : out.ball->vertices()) idx.push_back(a.ball->index_of(v));
  const auto n = static_cast<Eigen::Index>(idx.size());
  out.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out.entries(i, j) = a.entries(idx[i], idx[j]);
  }
  return out;
}

KernelMatrix adjoint_kernel(const KernelMatrix& a) {
  KernelMatrix out = a;
  out.source = "adjoint(" + a.source + ")";
  out.entries = a.entries.adjoint();
  return out;
}

KernelMatrix operator-(const KernelMatrix& a, const KernelMatrix& b) {
  if (a.q != b.q || a.radius() != b.radius()) {
    throw std::invalid_argument("kernel difference needs matching q and radius");
  }
  KernelMatrix out = a;
  out.source = "(" + a.source + ")-(" + b.source + ")";
  out.entries = a.entries - b.entries;
  out.known_range = (a.known_range >= 0 && b.known_range >= 0)
                        ? std::max(a.known_range, b.known_range)
                        : -1;
  if (a.grid_id != b.grid_id && a.grid_id == "exact") out.grid_id = b.grid_id;
  return out;
}

}  // namespace treepsi
