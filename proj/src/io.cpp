#include "treepsi/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace treepsi {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": bad number '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument(where + ": bad number '" + text + "'");
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FiniteFunction read_function_csv(std::istream& in, const TreeParams& params) {
  FiniteFunction f;
  std::set<Vertex> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("vertex_word", 0) == 0) continue;
    const std::string where = "function CSV line " + std::to_string(lineno);
    const auto cells = split_fields(line);
    if (cells.size() != 3) throw std::invalid_argument(where + ": expected 3 fields");
    Vertex x = parse_vertex(cells[0], params.q);
    if (!seen.insert(x).second) {
      throw std::invalid_argument(where + ": vertex '" + cells[0] + "' repeated");
    }
    f.support.emplace_back(std::move(x),
                           cplx(parse_double(cells[1], where), parse_double(cells[2], where)));
  }
  return f;
}

void write_function_csv(std::ostream& out, const FiniteFunction& f) {
  out << "vertex_word,re,im\n";
  for (const auto& [x, v] : f.support) {
    out << x.str() << ',' << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
  }
}

void write_spectral_csv(std::ostream& out, const SpectralFunction& F, const SGrid& grid) {
  out << "stub,node_index,s,re,im\n";
  for (std::size_t p = 0; p < F.stubs.size(); ++p) {
    const std::string stub = word_str(F.stubs[p]);
    for (std::size_t k = 0; k < F.n_nodes; ++k) {
      const cplx v = F.at(p, k);
      out << stub << ',' << k << ',' << format_number(grid.node(k)) << ','
          << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
    }
  }
}

void write_kernel_csv(std::ostream& out, const KernelMatrix& k) {
  out << "# q=" << k.q << " radius=" << k.radius() << " grid=" << k.grid_id
      << " source=" << k.source << " symbol_depth=" << k.symbol_depth
      << " vertices=" << k.size() << '\n';
  out << "x_word,y_word,d,re,im\n";
  const Ball& b = *k.ball;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::string xs = b[i].str();
    for (std::size_t j = 0; j < b.size(); ++j) {
      const cplx v = k.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out << xs << ',' << b[j].str() << ',' << distance(b[i], b[j]) << ','
          << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
    }
  }
}

void write_symbol_csv(std::ostream& out, const CylSymbol& a, int radius) {
  if (!a.covers_radius(radius)) throw DomainError("write_symbol_csv: radius outside symbol domain");
  out << "x_word,stub,term_index,re,im\n";
  const auto vertices = ball(a.params, Vertex{}, radius);
  const auto stubs = reduced_words(a.params, a.depth);
  for (const auto& x : vertices) {
    for (const auto& w : stubs) {
      for (std::size_t t = 0; t < a.terms.size(); ++t) {
        const cplx v = a.terms[t].spatial(x, w);
        out << x.str() << ',' << word_str(w) << ',' << t << ',' << format_number(v.real()) << ','
            << format_number(v.imag()) << '\n';
      }
    }
  }
}

}  // namespace treepsi
