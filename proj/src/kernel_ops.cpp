#include "treepsi/kernel_ops.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "treepsi/boundary.hpp"

namespace treepsi {

namespace {

double qpow(int q, double e) { return std::pow(static_cast<double>(q), e); }

std::vector<Eigen::Index> indices_in(const Ball& outer, const Ball& inner) {
  std::vector<Eigen::Index> idx;
  idx.reserve(inner.size());
  for (const Vertex& v : inner.vertices()) idx.push_back(outer.index_of(v));
  return idx;
}

/// sum_{n > tail} (1 + n)^{-3}, with the remainder past 10^5 bounded by an
/// integral.
double cubic_tail(int tail_radius) {
  constexpr int kTerms = 100000;
  double sum = 0.0;
  for (int m = kTerms; m >= tail_radius + 2; --m) sum += 1.0 / (static_cast<double>(m) * m * m);
  return sum + 1.0 / (2.0 * static_cast<double>(kTerms) * kTerms);
}

}  // namespace

DecayProfile decay_profile(const KernelMatrix& a, const SClassReport* report, double factor) {
  DecayProfile out;
  const auto& verts = a.ball->vertices();
  out.max_abs.assign(static_cast<std::size_t>(2 * a.radius() + 1), 0.0);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    for (std::size_t j = 0; j < verts.size(); ++j) {
      auto& slot = out.max_abs[static_cast<std::size_t>(distance(verts[i], verts[j]))];
      slot = std::max(slot, std::abs(a.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
  }
  for (int n = 0; n < kDecayOrders; ++n) {
    double c = 0.0;
    for (std::size_t d = 0; d < out.max_abs.size(); ++d) {
      c = std::max(c, std::pow(1.0 + d, n) * qpow(a.q, 0.5 * d) * out.max_abs[d]);
    }
    out.constants[n] = c;
  }
  if (report != nullptr) {
    std::array<double, kDecayOrders> shape{};
    for (int n = 0; n < kDecayOrders; ++n) {
      double s = report->omega_norm[n];
      for (int k = 0; k <= n + 1 && k <= kMaxDerivative; ++k) s += report->sup_norms[k];
      shape[n] = s;
      if (out.constants[n] > factor * s) out.flagged = true;
    }
    out.predicted_shape = shape;
  }
  return out;
}

std::array<double, kDecayOrders> negligibility_report(const KernelMatrix& a) {
  return decay_profile(a).constants;
}

double schur_series(int q, int dist, int tail_radius, int n_max, bool add_tail) {
  // Number of z at depth n off the geodesic above foot point k, times q^{-n}:
  // q^n at an endpoint, (q-1) q^{n-1} inside, (q+1) q^{n-1} when D = 0.
  const double mid_weight = (q - 1.0) / q;
  const double free_weight = (q + 1.0) / q;
  double sum = 0.0;
  for (int n = n_max; n >= 0; --n) {
    for (int k = 0; k <= dist; ++k) {
      const int dx = k + n;
      const int dy = dist - k + n;
      if (dx <= tail_radius || dy <= tail_radius) continue;
      double w;
      if (n == 0) w = 1.0;
      else if (dist == 0) w = free_weight;
      else if (k == 0 || k == dist) w = 1.0;
      else w = mid_weight;
      const double a = 1.0 + dx;
      const double b = 1.0 + dy;
      sum += w / (a * a * a * b * b * b);
    }
  }
  if (add_tail) {
    const double m = n_max + 1.0;
    sum += (dist + 1.0) * free_weight / (5.0 * std::pow(m, 5));
  }
  return sum;
}

double schur_lemma_constant(int q, int max_dist) {
  double best = 0.0;
  for (int d = 0; d <= max_dist; ++d) {
    best = std::max(best, std::pow(1.0 + d, 3) * schur_series(q, d, -1, 2000, true));
  }
  return best;
}

Composition compose_kernels(const KernelMatrix& a, const KernelMatrix& b, int tail_radius) {
  if (a.q != b.q || a.radius() != b.radius()) {
    throw std::invalid_argument("compose_kernels: operands differ in q or radius");
  }
  if (a.grid_id != b.grid_id && a.grid_id != "exact" && b.grid_id != "exact") {
    throw std::invalid_argument("compose_kernels: operands built on different s-grids");
  }
  if (tail_radius < 0 || tail_radius > a.radius()) {
    throw std::invalid_argument("compose_kernels: tail radius must lie in [0, R]");
  }
  const int inner = a.radius() - tail_radius;
  Composition out;
  out.kernel.ball = std::make_shared<const Ball>(TreeParams::make(a.q), inner);
  out.kernel.q = a.q;
  out.kernel.grid_id = a.grid_id == "exact" ? b.grid_id : a.grid_id;
  out.kernel.source = "compose(" + a.source + "," + b.source + ")";
  out.kernel.symbol_depth = std::max(a.symbol_depth, b.symbol_depth);
  if (a.known_range >= 0 && b.known_range >= 0) out.kernel.known_range = a.known_range + b.known_range;

  const auto idx = indices_in(*a.ball, *out.kernel.ball);
  const auto n = static_cast<Eigen::Index>(idx.size());
  const Eigen::Index full = a.entries.cols();
  Eigen::MatrixXcd rows(n, full), cols(full, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rows.row(i) = a.entries.row(idx[static_cast<std::size_t>(i)]);
    cols.col(i) = b.entries.col(idx[static_cast<std::size_t>(i)]);
  }
  out.kernel.entries = rows * cols;

  TailBound& tail = out.tail;
  tail.tail_radius = tail_radius;
  tail.per_distance.assign(static_cast<std::size_t>(2 * inner + 1), 0.0);
  // Every dropped z is at distance > T from both x and y, so an operand that
  // vanishes beyond T contributes nothing.
  const bool vanishing = (a.known_range >= 0 && a.known_range <= tail_radius) ||
                         (b.known_range >= 0 && b.known_range <= tail_radius);
  if (!vanishing) {
    const double c3 = decay_profile(a).constants[3] * decay_profile(b).constants[3];
    for (int d = 0; d <= 2 * inner; ++d) {
      const double v = c3 * qpow(a.q, -0.5 * d) * schur_series(a.q, d, tail_radius);
      tail.per_distance[static_cast<std::size_t>(d)] = v;
      tail.bound = std::max(tail.bound, v);
    }
  }
  return out;
}

NormEstimate opnorm_estimate(const Eigen::MatrixXcd& a, int max_iters, std::uint64_t seed) {
  NormEstimate est;
  const Eigen::Index n = a.cols();
  if (n == 0 || a.cwiseAbs().maxCoeff() == 0.0) {
    est.converged = true;
    return est;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(normal(rng), normal(rng));
  v.normalize();

  double lambda = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const Eigen::VectorXcd w = a.adjoint() * (a * v);
    const double next = v.dot(w).real();
    est.iterations = it;
    est.residual = (w - next * v).norm();
    const double wn = w.norm();
    if (wn == 0.0) {
      lambda = 0.0;
      est.converged = true;
      break;
    }
    const bool done = it > 1 && std::abs(next - lambda) <= kPowerTolerance * std::abs(next);
    lambda = next;
    if (done) {
      est.converged = true;
      break;
    }
    v = w / wn;
  }
  est.norm = std::sqrt(std::max(lambda, 0.0));
  return est;
}

NormEstimate opnorm_estimate(const KernelMatrix& a, int max_iters, std::uint64_t seed) {
  return opnorm_estimate(a.entries, max_iters, seed);
}

CylSymbol commutator_symbol(const CylSymbol& a) {
  const TreeParams& params = a.params;
  const double lq = params.log_q();
  const SProfile down = exp_i_profile(-lq);  // q^{-is}
  const SProfile up = exp_i_profile(lq);     // q^{is}
  CylSymbol c = scale_profiles(shift_compose(a), down) + cplx(-1.0) * scale_profiles(a, down);
  c = c + scale_profiles(transfer_L(a), up);
  c = c + cplx(-1.0) * scale_profiles(a, up);
  c = cplx(std::sqrt(static_cast<double>(params.q)) / (params.q + 1.0)) * c;
  c.description = "commutator(" + a.description + ")";
  return c;
}

namespace {

SharpProduct sharp_impl(const CylSymbol& a, const CylSymbol& b, int radius, int tail_radius,
                        const SGrid& grid, bool frozen) {
  if (a.params.q != b.params.q || grid.params().q != a.params.q) {
    throw std::invalid_argument("sharp product: symbols and grid differ in q");
  }
  if (tail_radius < 0 || tail_radius > radius) {
    throw std::invalid_argument("sharp product: tail radius must lie in [0, R]");
  }
  if (!a.covers_radius(radius) || !b.covers_radius(radius)) {
    throw DomainError("sharp product: symbol domain smaller than the ball");
  }
  const TreeParams& params = a.params;
  const double lq = params.log_q();
  const int mb = b.depth;

  SharpProduct out;
  out.ball = std::make_shared<const Ball>(params, radius - tail_radius);
  out.depth = mb + tail_radius;
  out.stubs = reduced_words(params, out.depth);
  out.n_nodes = grid.size();
  out.values.assign(out.ball->size() * out.stubs.size() * out.n_nodes, 0.0);

  std::vector<std::vector<cplx>> eta(b.terms.size(), std::vector<cplx>(grid.size()));
  for (std::size_t i = 0; i < b.terms.size(); ++i) {
    for (std::size_t k = 0; k < grid.size(); ++k) eta[i][k] = b.terms[i].profile.value(grid.node(k));
  }
  auto b_at_nodes = [&](const Vertex& v, std::span<const Color> stub, std::vector<cplx>& dst) {
    std::fill(dst.begin(), dst.end(), 0.0);
    for (std::size_t i = 0; i < b.terms.size(); ++i) {
      const cplx g = b.terms[i].spatial(v, stub);
      if (g == cplx(0.0)) continue;
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += g * eta[i][k];
    }
  };

  const SymbolKernel ka(a, grid, 2 * radius + 2);
  std::vector<cplx> bv(grid.size());
  for (std::size_t xi = 0; xi < out.ball->size(); ++xi) {
    const Vertex& x = (*out.ball)[xi];
    const auto gx = ka.spatial_table(x);
    const auto ys = ball(params, x, tail_radius);
    std::vector<cplx> kxy(ys.size());
    std::vector<Word> paths(ys.size());
    for (std::size_t yi = 0; yi < ys.size(); ++yi) {
      kxy[yi] = ka.entry(x, ys[yi], gx);
      paths[yi] = path_word(x, ys[yi]);
    }
    for (std::size_t wi = 0; wi < out.stubs.size(); ++wi) {
      const Word& w = out.stubs[wi];
      if (frozen) b_at_nodes(x, std::span(w).first(static_cast<std::size_t>(mb)), bv);
      std::vector<CompensatedSum> acc(grid.size());
      for (std::size_t yi = 0; yi < ys.size(); ++yi) {
        const int h = height_diff_raw(paths[yi], w);
        if (!frozen) {
          Word from_y = ray_from(ys[yi], x, w);
          from_y.resize(static_cast<std::size_t>(mb));
          b_at_nodes(ys[yi], from_y, bv);
        }
        const double mag = qpow(params.q, 0.5 * h);
        for (std::size_t k = 0; k < grid.size(); ++k) {
          acc[k].add(kxy[yi] * std::polar(mag, -h * grid.node(k) * lq) * bv[k]);
        }
      }
      for (std::size_t k = 0; k < grid.size(); ++k) {
        out.values[(xi * out.stubs.size() + wi) * out.n_nodes + k] = acc[k].value();
      }
    }
  }

  // Dropped y lie at distance n > T. On the sphere of radius n the weights
  // q^{h/2} sum to (1 + n) q^{n/2}, so with |k_a| <= C_4 q^{-n/2} (1+n)^{-4}
  // the tail is at most C_4 sup|b| sum_{n > T} (1 + n)^{-3}.
  const double c4 = decay_profile(kernel_of_symbol(a, radius, grid)).constants[4];
  double sup_b = 0.0;
  const auto stubs_b = reduced_words(params, mb);
  for (const Vertex& v : ball(params, Vertex{}, radius)) {
    for (const Word& p : stubs_b) {
      b_at_nodes(v, p, bv);
      for (const cplx& z : bv) sup_b = std::max(sup_b, std::abs(z));
    }
  }
  out.tail.tail_radius = tail_radius;
  out.tail.bound = c4 * sup_b * cubic_tail(tail_radius);
  out.tail.per_distance = {out.tail.bound};
  return out;
}

}  // namespace

SharpProduct sharp_product_symbol(const CylSymbol& a, const CylSymbol& b, int radius,
                                  int tail_radius, const SGrid& grid) {
  return sharp_impl(a, b, radius, tail_radius, grid, false);
}

SharpProduct sharp_product_frozen(const CylSymbol& a, const CylSymbol& b, int radius,
                                  int tail_radius, const SGrid& grid) {
  return sharp_impl(a, b, radius, tail_radius, grid, true);
}

}  // namespace treepsi
