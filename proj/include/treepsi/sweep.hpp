#pragma once

// Epsilon sweeps of the adjoint and product remainders at a fixed truncation.

#include <array>
#include <iosfwd>
#include <vector>

#include "treepsi/config.hpp"

namespace treepsi {

inline constexpr int kSweepOrders = 4;  // C_N for N = 0..3

struct SweepRow {
  double epsilon = 0.0;
  /// ||Op(a)* - Op(conj a)|| on the inner ball, a from the configured family.
  double adjoint_norm = 0.0;
  /// ||Op(a) Op(b) - Op(ab)|| on the inner ball, a = bump, b = shifted_k.
  double product_norm = 0.0;
  std::array<double, kSweepOrders> adjoint_constants{};
  std::array<double, kSweepOrders> product_constants{};
  /// Certified bound on the part of the product dropped by truncation.
  double product_tail = 0.0;
  double adjoint_seconds = 0.0;
  double product_seconds = 0.0;
};

/// One row per entry of cfg.epsilons, on ball(o, sweep_radius) with the
/// remainders compared on ball(o, sweep_radius - tail_radius).
std::vector<SweepRow> run_sweep(const RunConfig& cfg);

/// Deterministic CSV: every column except the runtimes.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Plain-text summary including runtimes.
void write_sweep_report(std::ostream& out, const RunConfig& cfg, const std::vector<SweepRow>& rows);

}  // namespace treepsi
