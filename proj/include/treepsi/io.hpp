#pragma once

// CSV reading and writing. Numbers are printed with 17 significant digits so
// that doubles round-trip.

#include <iosfwd>
#include <string>

#include "treepsi/fourier_helgason.hpp"
#include "treepsi/kernel.hpp"
#include "treepsi/symbols.hpp"

namespace treepsi {

std::string format_number(double v);

/// Lines `vertex_word,re,im`; an optional header starting with
/// `vertex_word` is skipped, as are blank lines. The root is the empty word.
/// Throws std::invalid_argument on malformed lines or repeated vertices.
FiniteFunction read_function_csv(std::istream& in, const TreeParams& params);

void write_function_csv(std::ostream& out, const FiniteFunction& f);

/// Header `stub,node_index,s,re,im`, one row per table entry.
void write_spectral_csv(std::ostream& out, const SpectralFunction& F, const SGrid& grid);

/// A `# key=value ...` metadata line, the header `x_word,y_word,d,re,im`,
/// then one row per pair of ball vertices.
void write_kernel_csv(std::ostream& out, const KernelMatrix& k);

/// Spatial parts of a symbol on ball(o, radius) in the layout read by
/// load_symbol_csv.
void write_symbol_csv(std::ostream& out, const CylSymbol& a, int radius);

}  // namespace treepsi
