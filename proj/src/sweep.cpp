#include "treepsi/sweep.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>

#include "treepsi/io.hpp"
#include "treepsi/kernel.hpp"
#include "treepsi/kernel_ops.hpp"
#include "treepsi/symbols.hpp"

namespace treepsi {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <std::size_t N>
std::array<double, kSweepOrders> leading(const std::array<double, N>& c) {
  std::array<double, kSweepOrders> out{};
  std::copy_n(c.begin(), kSweepOrders, out.begin());
  return out;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  validate_config(cfg);
  const TreeParams params = TreeParams::make(cfg.q);
  const SGrid grid = build_grid(params, cfg.snodes);
  const int radius = cfg.sweep_radius;
  const int inner = radius - cfg.tail_radius;
  const FamilyKind adjoint_kind = parse_family(cfg.family);

  FamilyParams base;
  base.shift = cfg.shift;
  base.chi_radius = cfg.chi_radius;
  const CylSymbol bump = builtin_family(FamilyKind::bump_profile_only, params, base);
  const KernelMatrix k_bump = kernel_of_symbol(bump, radius, grid);

  std::vector<SweepRow> rows;
  for (double eps : cfg.epsilons) {
    SweepRow row;
    row.epsilon = eps;
    FamilyParams fp = base;
    fp.epsilon = eps;

    auto t0 = std::chrono::steady_clock::now();
    const CylSymbol a = builtin_family(adjoint_kind, params, fp);
    const KernelMatrix adj = restrict_kernel(
        adjoint_kernel(kernel_of_symbol(a, radius, grid)) - kernel_of_symbol(conj(a), radius, grid),
        inner);
    row.adjoint_norm = opnorm_estimate(adj, kPowerIterations, cfg.seed).norm;
    row.adjoint_constants = leading(negligibility_report(adj));
    row.adjoint_seconds = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const CylSymbol b = builtin_family(FamilyKind::shifted_k, params, fp);
    const Composition comp = compose_kernels(k_bump, kernel_of_symbol(b, radius, grid), cfg.tail_radius);
    const KernelMatrix prod = comp.kernel - kernel_of_symbol(multiply(bump, b), inner, grid);
    row.product_norm = opnorm_estimate(prod, kPowerIterations, cfg.seed).norm;
    row.product_constants = leading(negligibility_report(prod));
    row.product_tail = comp.tail.bound;
    row.product_seconds = seconds_since(t0);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "epsilon,adjoint_norm,product_norm";
  for (const char* which : {"adjoint", "product"}) {
    for (int n = 0; n < kSweepOrders; ++n) out << ',' << which << "_C" << n;
  }
  out << ",product_tail\n";
  for (const auto& r : rows) {
    out << format_number(r.epsilon) << ',' << format_number(r.adjoint_norm) << ','
        << format_number(r.product_norm);
    for (double c : r.adjoint_constants) out << ',' << format_number(c);
    for (double c : r.product_constants) out << ',' << format_number(c);
    out << ',' << format_number(r.product_tail) << '\n';
  }
}

void write_sweep_report(std::ostream& out, const RunConfig& cfg, const std::vector<SweepRow>& rows) {
  out << "sweep: q=" << cfg.q << " R=" << cfg.sweep_radius << " T=" << cfg.tail_radius
      << " snodes=" << cfg.snodes << " adjoint family=" << cfg.family << " shift=" << cfg.shift
      << '\n';
  char buf[160];
  std::snprintf(buf, sizeof buf, "%10s %14s %14s %12s %12s %9s %9s\n", "epsilon", "adjoint", "product",
                "adj/eps", "prod/eps", "t_adj", "t_prod");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%10.4g %14.6e %14.6e %12.4e %12.4e %8.2fs %8.2fs\n", r.epsilon,
                  r.adjoint_norm, r.product_norm, r.adjoint_norm / r.epsilon, r.product_norm / r.epsilon,
                  r.adjoint_seconds, r.product_seconds);
    out << buf;
  }
}

}  // namespace treepsi
