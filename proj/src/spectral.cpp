#include "treepsi/spectral.hpp"

#include <cmath>
#include <numbers>
#include <utility>
#include <stdexcept>

#include "treepsi/boundary.hpp"

namespace treepsi {

double c_abs_inv_sq(double s, const TreeParams& params) {
  const double q = params.q;
  const double lq = params.log_q();
  const double sn = std::sin(s * lq);
  const double denom = q + 1.0 / q - 2.0 * std::cos(2.0 * s * lq);
  return (q + 1.0) * (q + 1.0) / q * 4.0 * sn * sn / denom;
}

cplx c_function(double s, const TreeParams& params) {
  const double q = params.q;
  const double lq = params.log_q();
  const cplx i(0.0, 1.0);
  const cplx qiz = std::exp(i * s * lq);  // q^{is}
  const double sq = std::sqrt(q);
  const cplx num = sq * qiz - 1.0 / (sq * qiz);
  const cplx den = qiz - 1.0 / qiz;
  return sq / (q + 1.0) * num / den;
}

double plancherel_constant(const TreeParams& params) {
  const double q = params.q;
  return q * params.log_q() / (4.0 * std::numbers::pi * (q + 1.0));
}

double plancherel_density(double s, const TreeParams& params) {
  return 2.0 * plancherel_constant(params) * c_abs_inv_sq(s, params);
}

double laplacian_eigencurve(double s, const TreeParams& params) {
  const double q = params.q;
  return 2.0 * std::sqrt(q) * std::cos(s * params.log_q()) / (q + 1.0);
}

double spherical_explicit(double s, int d, const TreeParams& params) {
  const double q = params.q;
  const double decay = std::pow(q, -0.5 * d);
  const double lattice = ((q - 1.0) / (q + 1.0) * d + 1.0) * decay;
  if (s <= 0.0) return lattice;
  if (s >= params.tau) return (d % 2 == 0) ? lattice : -lattice;

  const double theta = s * params.log_q();
  const double sn = std::sin(theta);
  if (std::abs(sn) < 1e-3) {
    // Same function rewritten without the 1/sin cancellation of the
    // c-function form; continuous through the lattice points.
    return decay / (q + 1.0) *
           (q * std::sin((d + 1) * theta) - std::sin((d - 1) * theta)) / sn;
  }
  const cplx i(0.0, 1.0);
  const cplx up = std::exp((i * s - 0.5) * static_cast<double>(d) * params.log_q());
  const cplx down = std::exp((-i * s - 0.5) * static_cast<double>(d) * params.log_q());
  return (c_function(s, params) * up + c_function(-s, params) * down).real();
}

double spherical_via_boundary(double s, const Vertex& x, const TreeParams& params) {
  const EPartition part = e_partition(params, x);
  const int n = static_cast<int>(x.length());
  const double lq = params.log_q();
  cplx sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    const Rational& m = part.masses[static_cast<std::size_t>(j)];
    const double mass = static_cast<double>(m.numerator()) / static_cast<double>(m.denominator());
    const int h = 2 * j - n;
    sum += mass * std::exp(cplx(0.5, s) * (h * lq));
  }
  return sum.real();
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  // Returns (P_n(x), P_n'(x)) by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };

  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

SGrid::SGrid(const TreeParams& params, std::vector<double> nodes, std::vector<double> weights)
    : params_(params), nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.size() != weights_.size()) {
    throw std::invalid_argument("SGrid: nodes and weights differ in length");
  }
}

SGrid::SGrid(const SGrid& other)
    : params_(other.params_), nodes_(other.nodes_), weights_(other.weights_) {
  std::lock_guard lock(other.mutex_);
  moments_ = other.moments_;
}

std::string SGrid::id() const {
  return "gl" + std::to_string(nodes_.size()) + "-q" + std::to_string(params_.q);
}

cplx SGrid::moment(int m) const {
  {
    std::lock_guard lock(mutex_);
    auto it = moments_.find(m);
    if (it != moments_.end()) return it->second;
  }
  const double lq = params_.log_q();
  // Real and imaginary parts are summed separately so M_{-m} is the exact
  // conjugate of M_m (cos is even, sin is odd, bit for bit).
  CompensatedSum sum;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const double arg = static_cast<double>(m) * nodes_[k] * lq;
    const double mag = std::abs(arg);
    const double sn = std::sin(mag);
    sum.add(weights_[k] * cplx(std::cos(mag), arg < 0 ? -sn : sn));
  }
  const cplx value = sum.value();
  std::lock_guard lock(mutex_);
  moments_.emplace(m, value);
  return value;
}

cplx SGrid::weighted_sum(int h, const std::vector<cplx>& values) const {
  const double lq = params_.log_q();
  CompensatedSum sum;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    sum.add(weights_[k] * std::polar(1.0, h * nodes_[k] * lq) * values[k]);
  }
  return sum.value();
}

SGrid build_grid(const TreeParams& params, int n_nodes) {
  if (n_nodes < kMinGridNodes) {
    throw std::invalid_argument("build_grid: at least " + std::to_string(kMinGridNodes) +
                                " nodes are required for a reliable quadrature");
  }
  const GaussRule rule = gauss_legendre(n_nodes);
  const double half = 0.5 * params.tau;
  std::vector<double> nodes(rule.nodes.size());
  std::vector<double> weights(rule.nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    nodes[k] = half * (rule.nodes[k] + 1.0);
    weights[k] = half * rule.weights[k] * plancherel_density(nodes[k], params);
  }
  return SGrid(params, std::move(nodes), std::move(weights));
}

std::vector<double> uniform_s_samples(const TreeParams& params, int n) {
  if (n < 2) throw std::invalid_argument("uniform_s_samples: need at least two points");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = params.tau * i / (n - 1);
  out.back() = params.tau;
  return out;
}

}  // namespace treepsi
