#include "treepsi/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "treepsi/boundary.hpp"

namespace treepsi {

namespace {

void check_order(int k) {
  if (k < 0 || k > kMaxDerivative) {
    throw std::invalid_argument("derivative order " + std::to_string(k) + " outside [0, " +
                                std::to_string(kMaxDerivative) + "]");
  }
}

int shrink_radius(int radius, int by) {
  if (radius == kUnboundedRadius) return radius;
  if (radius - by < 0) throw DomainError("symbol domain exhausted");
  return radius - by;
}

void check_same_tree(const TreeParams& a, const TreeParams& b) {
  if (a.q != b.q) throw std::invalid_argument("symbols live on trees with different q");
}

/// Term re-expressed on stubs of a larger depth.
SymbolTerm lift(const SymbolTerm& t, int from_depth) {
  auto g = t.spatial;
  const std::size_t m = static_cast<std::size_t>(from_depth);
  return {[g, m](const Vertex& x, std::span<const Color> w) { return g(x, w.first(m)); },
          t.profile};
}

}  // namespace

cplx SProfile::derivative(double s, int k) const {
  check_order(k);
  return jet(s).derivative(k);
}

SProfile constant_profile(cplx value) {
  std::ostringstream name;
  if (value == cplx(1.0)) name << "one";
  else name << "const(" << value.real() << "," << value.imag() << ")";
  return {name.str(), [value](double) { return Jet::constant(value); }, value == cplx(0.0)};
}

SProfile bump_profile(const TreeParams& params) {
  const double tau = params.tau;
  return {"bump",
          [tau](double s) {
            const double u0 = s / tau;
            if (!(u0 > 0.0 && u0 < 1.0)) return Jet{};
            const double inv = 1.0 / (u0 * (1.0 - u0));
            // exp(-inv) underflows; every derivative is below it too.
            if (inv > 700.0) return Jet{};
            const Jet u = Jet::variable(s) * (1.0 / tau);
            return exp(-reciprocal(u * (Jet::constant(1.0) - u)));
          },
          true};
}

SProfile eigencurve_profile(const TreeParams& params) {
  const double amp = 2.0 * std::sqrt(static_cast<double>(params.q)) / (params.q + 1.0);
  const double lq = params.log_q();
  return {"eigencurve", [amp, lq](double s) { return cos_linear(lq, 0.0, s) * amp; }, false};
}

SProfile exp_i_profile(double omega) {
  return {"exp_i(" + std::to_string(omega) + ")",
          [omega](double s) { return exp_i_linear(omega, s); }, false};
}

SProfile operator*(const SProfile& a, const SProfile& b) {
  if (a.name == "one") return b;
  if (b.name == "one") return a;
  auto fa = a.jet;
  auto fb = b.jet;
  return {a.name + "*" + b.name, [fa, fb](double s) { return fa(s) * fb(s); },
          a.endpoint_flat || b.endpoint_flat};
}

SProfile conj(const SProfile& p) {
  auto f = p.jet;
  return {"conj(" + p.name + ")",
          [f](double s) {
            Jet j = f(s);
            for (auto& c : j.c) c = std::conj(c);
            return j;
          },
          p.endpoint_flat};
}

SProfile named_profile(const std::string& name, const TreeParams& params) {
  if (name == "one") return constant_profile(1.0);
  if (name == "bump") return bump_profile(params);
  if (name == "eigencurve") return eigencurve_profile(params);
  throw std::invalid_argument("unknown profile '" + name + "' (expected one, bump, eigencurve)");
}

CylSymbol profile_symbol(const TreeParams& params, SProfile profile) {
  CylSymbol a;
  a.params = params;
  a.description = profile.name;
  a.terms.push_back({[](const Vertex&, std::span<const Color>) { return cplx(1.0); },
                     std::move(profile)});
  return a;
}

CylSymbol constant_symbol(const TreeParams& params, cplx value) {
  return profile_symbol(params, constant_profile(value));
}

CylSymbol radial_symbol(const TreeParams& params, std::function<cplx(const Vertex&)> g,
                        SProfile profile, std::string description) {
  CylSymbol a;
  a.params = params;
  a.description = std::move(description);
  a.terms.push_back(
      {[g = std::move(g)](const Vertex& x, std::span<const Color>) { return g(x); },
       std::move(profile)});
  return a;
}

cplx eval_ds(const CylSymbol& a, const Vertex& x, std::span<const Color> w, double s, int k) {
  check_order(k);
  if (!a.contains(x)) throw DomainError("vertex " + x.str() + " outside the symbol domain");
  if (static_cast<int>(w.size()) < a.depth) {
    throw DomainError("stub shorter than the symbol depth");
  }
  const auto stub = w.first(static_cast<std::size_t>(a.depth));
  cplx sum = 0.0;
  for (const auto& t : a.terms) {
    const cplx g = t.spatial(x, stub);
    if (g != cplx(0.0)) sum += g * t.profile.derivative(s, k);
  }
  return sum;
}

cplx eval(const CylSymbol& a, const Vertex& x, std::span<const Color> w, double s) {
  return eval_ds(a, x, w, s, 0);
}

CylSymbol operator+(const CylSymbol& a, const CylSymbol& b) {
  check_same_tree(a.params, b.params);
  CylSymbol out;
  out.params = a.params;
  out.depth = std::max(a.depth, b.depth);
  out.domain_radius = std::min(a.domain_radius, b.domain_radius);
  out.description = "(" + a.description + ")+(" + b.description + ")";
  for (const auto& t : a.terms) out.terms.push_back(lift(t, a.depth));
  for (const auto& t : b.terms) out.terms.push_back(lift(t, b.depth));
  return out;
}

CylSymbol operator*(cplx c, const CylSymbol& a) {
  CylSymbol out = a;
  for (auto& t : out.terms) {
    auto g = t.spatial;
    t.spatial = [g, c](const Vertex& x, std::span<const Color> w) { return c * g(x, w); };
  }
  return out;
}

CylSymbol multiply(const CylSymbol& a, const CylSymbol& b) {
  check_same_tree(a.params, b.params);
  CylSymbol out;
  out.params = a.params;
  out.depth = std::max(a.depth, b.depth);
  out.domain_radius = std::min(a.domain_radius, b.domain_radius);
  out.description = "(" + a.description + ")*(" + b.description + ")";
  const std::size_t ma = static_cast<std::size_t>(a.depth);
  const std::size_t mb = static_cast<std::size_t>(b.depth);
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      auto ga = ta.spatial;
      auto gb = tb.spatial;
      out.terms.push_back({[ga, gb, ma, mb](const Vertex& x, std::span<const Color> w) {
                             const cplx u = ga(x, w.first(ma));
                             return u == cplx(0.0) ? u : u * gb(x, w.first(mb));
                           },
                           ta.profile * tb.profile});
    }
  }
  return out;
}

CylSymbol conj(const CylSymbol& a) {
  CylSymbol out = a;
  out.description = "conj(" + a.description + ")";
  for (auto& t : out.terms) {
    auto g = t.spatial;
    t.spatial = [g](const Vertex& x, std::span<const Color> w) { return std::conj(g(x, w)); };
    t.profile = conj(t.profile);
  }
  return out;
}

CylSymbol scale_profiles(const CylSymbol& a, const SProfile& p) {
  CylSymbol out = a;
  for (auto& t : out.terms) t.profile = t.profile * p;
  return out;
}

CylSymbol shift_compose(const CylSymbol& a) {
  CylSymbol out;
  out.params = a.params;
  out.depth = a.depth + 1;
  out.domain_radius = shrink_radius(a.domain_radius, 1);
  out.description = "shift(" + a.description + ")";
  for (const auto& t : a.terms) {
    auto g = t.spatial;
    out.terms.push_back({[g](const Vertex& x, std::span<const Color> w) {
                           return g(step(x, w[0]), w.subspan(1));
                         },
                         t.profile});
  }
  return out;
}

CylSymbol transfer_L(const CylSymbol& a) {
  CylSymbol out;
  out.params = a.params;
  out.depth = std::max(a.depth - 1, 1);
  out.domain_radius = shrink_radius(a.domain_radius, 1);
  out.description = "transfer(" + a.description + ")";
  const int q = a.params.q;
  const std::size_t m = static_cast<std::size_t>(a.depth);
  for (const auto& t : a.terms) {
    auto g = t.spatial;
    out.terms.push_back({[g, q, m](const Vertex& x, std::span<const Color> w) {
                           Word stub(m);
                           if (m > 0) std::copy(w.begin(), w.begin() + (m - 1), stub.begin() + 1);
                           cplx sum = 0.0;
                           for (int c = 0; c <= q; ++c) {
                             if (c == w[0]) continue;
                             // The edge from x.c back to x has color c.
                             if (m > 0) stub[0] = static_cast<Color>(c);
                             sum += g(step(x, static_cast<Color>(c)), stub);
                           }
                           return sum / static_cast<double>(q);
                         },
                         t.profile});
  }
  return out;
}

CylSymbol average_En(const CylSymbol& a, int n) {
  if (n >= a.depth) return a;
  CylSymbol out;
  out.params = a.params;
  out.domain_radius = a.domain_radius;
  out.description = "E" + std::to_string(n) + "(" + a.description + ")";
  if (n < 0) return out;
  out.depth = n;
  const TreeParams params = a.params;
  const int refine = a.depth - n;
  for (const auto& t : a.terms) {
    auto g = t.spatial;
    out.terms.push_back({[g, params, refine](const Vertex& x, std::span<const Color> w) {
                           Word prefix(w.begin(), w.end());
                           std::vector<Word> cells;
                           detail::extend_reduced(params, prefix, refine, cells);
                           cplx sum = 0.0;
                           for (const Word& c : cells) sum += g(x, c);
                           return sum / static_cast<double>(cells.size());
                         },
                         t.profile});
  }
  return out;
}

CylSymbol average_En(const CylSymbol& a, int n, const Vertex& base, int out_radius) {
  CylSymbol out;
  out.params = a.params;
  out.domain_radius = std::min(a.domain_radius, out_radius);
  out.description = "E" + std::to_string(n) + "@" + base.str() + "(" + a.description + ")";
  if (n < 0) return out;
  out.depth = n + static_cast<int>(base.length()) + out_radius;
  const TreeParams params = a.params;
  const int m = a.depth;
  for (const auto& t : a.terms) {
    auto g = t.spatial;
    out.terms.push_back({[g, params, m, n, base](const Vertex& y, std::span<const Color> w) {
                           return cylinder_average<cplx>(
                               params, base, n, y, w, m,
                               [&](std::span<const Color> stub) { return g(y, stub); });
                         },
                         t.profile});
  }
  return out;
}

DoubleSymbol left_double(const CylSymbol& a) {
  DoubleSymbol c;
  c.params = a.params;
  c.depth = a.depth;
  c.description = "left(" + a.description + ")";
  for (const auto& t : a.terms) {
    auto g = t.spatial;
    c.terms.push_back(
        {[g](const Vertex& x, const Vertex&, std::span<const Color> w) { return g(x, w); },
         t.profile});
  }
  return c;
}

DoubleSymbol right_double(const CylSymbol& b) {
  DoubleSymbol c;
  c.params = b.params;
  c.depth = b.depth;
  c.extends_with_distance = true;
  c.description = "right(" + b.description + ")";
  const std::size_t m = static_cast<std::size_t>(b.depth);
  for (const auto& t : b.terms) {
    auto g = t.spatial;
    c.terms.push_back({[g, m](const Vertex& x, const Vertex& y, std::span<const Color> w) {
                         Word from_y = ray_from(y, x, w);
                         from_y.resize(m);
                         return g(y, from_y);
                       },
                       t.profile});
  }
  return c;
}

cplx eval_double(const DoubleSymbol& c, const Vertex& x, const Vertex& y,
                 std::span<const Color> w, double s) {
  const int need = c.stub_depth(distance(x, y));
  if (static_cast<int>(w.size()) < need) throw DomainError("stub shorter than the symbol depth");
  const auto stub = w.first(static_cast<std::size_t>(need));
  cplx sum = 0.0;
  for (const auto& t : c.terms) sum += t.spatial(x, y, stub) * t.profile.value(s);
  return sum;
}

namespace {

/// Profile derivatives tabulated over sample points: table[term][k][j].
struct ProfileTable {
  std::vector<std::vector<std::vector<cplx>>> d;

  ProfileTable(const CylSymbol& a, const std::vector<double>& samples) {
    d.resize(a.terms.size());
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
      d[i].assign(kMaxDerivative + 1, std::vector<cplx>(samples.size()));
      for (std::size_t j = 0; j < samples.size(); ++j) {
        const Jet jt = a.terms[i].profile.jet(samples[j]);
        for (int k = 0; k <= kMaxDerivative; ++k) d[i][k][j] = jt.derivative(k);
      }
    }
  }

  /// max_j |sum_i coeff_i d^k eta_i(s_j)|.
  double sup(const std::vector<cplx>& coeff, int k) const {
    double best = 0.0;
    const std::size_t n = d.empty() ? 0 : d[0][0].size();
    for (std::size_t j = 0; j < n; ++j) {
      cplx v = 0.0;
      for (std::size_t i = 0; i < coeff.size(); ++i) v += coeff[i] * d[i][k][j];
      best = std::max(best, std::abs(v));
    }
    return best;
  }
};

std::vector<cplx> spatial_values(const CylSymbol& a, const Vertex& x, std::span<const Color> stub) {
  std::vector<cplx> out(a.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) out[i] = a.terms[i].spatial(x, stub);
  return out;
}

/// Replaces each vector by itself minus its average over the cells sharing
/// the first n letters. Cells all have equal measure.
std::vector<std::vector<cplx>> subtract_prefix_average(const std::vector<Word>& cells,
                                                       const std::vector<std::vector<cplx>>& v,
                                                       int n) {
  std::map<Word, std::pair<std::vector<cplx>, int>> groups;
  const std::size_t terms = v.empty() ? 0 : v[0].size();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Word key(cells[c].begin(), cells[c].begin() + n);
    auto& [sum, count] = groups[key];
    if (sum.empty()) sum.assign(terms, 0.0);
    for (std::size_t i = 0; i < terms; ++i) sum[i] += v[c][i];
    ++count;
  }
  std::vector<std::vector<cplx>> out(v.size(), std::vector<cplx>(terms));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& [sum, count] = groups.at(Word(cells[c].begin(), cells[c].begin() + n));
    for (std::size_t i = 0; i < terms; ++i) out[c][i] = v[c][i] - sum[i] / static_cast<double>(count);
  }
  return out;
}

}  // namespace

SClassReport validate_class(const CylSymbol& a, const ValidateOptions& options) {
  const int radius = options.test_radius;
  if (!a.covers_radius(radius)) {
    throw DomainError("validate_class: test radius exceeds the symbol domain");
  }
  const TreeParams& params = a.params;
  const int m = a.depth;
  const auto samples = uniform_s_samples(params, options.s_samples);
  const ProfileTable table(a, samples);
  const auto vertices = ball(params, Vertex{}, radius);
  const auto stubs = reduced_words(params, m);

  SClassReport rep;
  rep.depth = m;
  rep.test_radius = radius;
  rep.omega_residual.assign(static_cast<std::size_t>(m + 3), 0.0);

  const std::size_t last = samples.size() - 1;
  for (const Vertex& x : vertices) {
    std::vector<std::vector<cplx>> g(stubs.size());
    for (std::size_t p = 0; p < stubs.size(); ++p) {
      g[p] = spatial_values(a, x, stubs[p]);
      for (int k = 0; k <= kMaxDerivative; ++k) {
        rep.sup_norms[k] = std::max(rep.sup_norms[k], table.sup(g[p], k));
        for (std::size_t j : {std::size_t{0}, last}) {
          cplx v = 0.0;
          for (std::size_t i = 0; i < g[p].size(); ++i) v += g[p][i] * table.d[i][k][j];
          rep.endpoint_max = std::max(rep.endpoint_max, std::abs(v));
        }
      }
    }
    for (int n = 0; n <= m + 2; ++n) {
      if (n >= m) continue;  // cylinder-constant: the residual is exactly zero
      const auto resid = subtract_prefix_average(stubs, g, n);
      for (const auto& r : resid) {
        rep.omega_residual[n] = std::max(rep.omega_residual[n], table.sup(r, 0));
      }
    }
  }
  for (int N = 0; N <= kMaxDerivative; ++N) {
    double best = 0.0;
    for (int n = 0; n <= m + 2; ++n) {
      best = std::max(best, std::pow(n + 1.0, N) * rep.omega_residual[n]);
    }
    rep.omega_norm[N] = best;
  }

  // Lipschitz in x at fixed omega; omega ranges over cylinders at o fine
  // enough to fix the first m steps from every vertex of the test ball.
  const auto omegas = reduced_words(params, radius + m);
  std::vector<std::vector<cplx>> at(vertices.size());
  for (const Word& r : omegas) {
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      Word stub = ray_from(vertices[v], Vertex{}, r);
      stub.resize(static_cast<std::size_t>(m));
      at[v] = spatial_values(a, vertices[v], stub);
    }
    for (std::size_t u = 0; u < vertices.size(); ++u) {
      for (std::size_t v = u + 1; v < vertices.size(); ++v) {
        std::vector<cplx> diff(at[u].size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = at[u][i] - at[v][i];
        const double d = distance(vertices[u], vertices[v]);
        for (int k = 0; k <= kMaxDerivative; ++k) {
          rep.lipschitz_x[k] = std::max(rep.lipschitz_x[k], table.sup(diff, k) / d);
        }
      }
    }
  }

  // Cross condition: (a - E^x_n a)(x) - (a - E^x_n a)(y) over depth m + d
  // cylinders at x, where both a(x, .) and a(y, .) are constant.
  const int lmax = options.max_cross_order;
  rep.cross_constants.assign(static_cast<std::size_t>(lmax + 1),
                             std::vector<double>(static_cast<std::size_t>(2 * radius + 1), 0.0));
  for (const Vertex& x : vertices) {
    for (const Vertex& y : vertices) {
      const int t = distance(x, y);
      const auto cells = reduced_words(params, m + t);
      std::vector<std::vector<cplx>> diff(cells.size());
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto gx = spatial_values(a, x, std::span(cells[c]).first(static_cast<std::size_t>(m)));
        Word from_y = ray_from(y, x, cells[c]);
        from_y.resize(static_cast<std::size_t>(m));
        const auto gy = spatial_values(a, y, from_y);
        diff[c].resize(gx.size());
        for (std::size_t i = 0; i < gx.size(); ++i) diff[c][i] = gx[i] - gy[i];
      }
      for (int n = 0; n < m + t; ++n) {
        const auto resid = subtract_prefix_average(cells, diff, n);
        double worst = 0.0;
        for (const auto& r : resid) worst = std::max(worst, table.sup(r, 0));
        for (int l = 0; l <= lmax; ++l) {
          auto& slot = rep.cross_constants[l][static_cast<std::size_t>(t)];
          slot = std::max(slot, std::pow(1.0 + n, l) * worst / options.epsilon);
        }
      }
    }
  }
  return rep;
}

FamilyKind parse_family(const std::string& name) {
  if (name == "bump_profile_only") return FamilyKind::bump_profile_only;
  if (name == "radial_eps") return FamilyKind::radial_eps;
  if (name == "shifted_k") return FamilyKind::shifted_k;
  throw std::invalid_argument("invalid family kind '" + name +
                              "' (expected bump_profile_only, radial_eps, shifted_k)");
}

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::bump_profile_only: return "bump_profile_only";
    case FamilyKind::radial_eps: return "radial_eps";
    case FamilyKind::shifted_k: return "shifted_k";
  }
  return "unknown";
}

double radial_cutoff(double t, double rho) {
  const double u = (t + 0.5 * rho) / rho;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

CylSymbol builtin_family(FamilyKind kind, const TreeParams& params, const FamilyParams& fp) {
  if (kind == FamilyKind::bump_profile_only) {
    CylSymbol a = profile_symbol(params, bump_profile(params));
    a.description = "bump_profile_only";
    return a;
  }
  if (!(fp.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(fp.chi_radius > 0.0)) throw std::invalid_argument("chi support radius must be positive");
  const double eps = fp.epsilon;
  const double rho = fp.chi_radius;
  std::ostringstream desc;
  desc << "radial_eps(eps=" << eps << ",rho=" << rho << ")";
  CylSymbol a = radial_symbol(
      params,
      [eps, rho](const Vertex& x) { return cplx(radial_cutoff(eps * x.length(), rho)); },
      bump_profile(params), desc.str());
  if (kind == FamilyKind::radial_eps) return a;
  if (fp.shift < 0) throw std::invalid_argument("shift count must be nonnegative");
  for (int i = 0; i < fp.shift; ++i) a = shift_compose(a);
  a.description = "shifted_k(k=" + std::to_string(fp.shift) + "," + desc.str() + ")";
  return a;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CylSymbol load_symbol_csv(std::istream& in, const TreeParams& params,
                          const std::vector<SProfile>& profiles) {
  using Key = std::pair<Word, Word>;
  std::vector<std::map<Key, cplx>> tables(profiles.size());
  int depth = -1;
  int radius = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("x_word", 0) == 0) continue;
    const auto cells = split_csv(line);
    const std::string where = "symbol CSV line " + std::to_string(lineno);
    if (cells.size() != 5) throw std::invalid_argument(where + ": expected 5 fields");
    Word x = parse_word(cells[0], params.q);
    Word stub = parse_word(cells[1], params.q);
    std::size_t term = 0;
    cplx value;
    try {
      term = std::stoul(cells[2]);
      value = cplx(std::stod(cells[3]), std::stod(cells[4]));
    } catch (const std::exception&) {
      throw std::invalid_argument(where + ": bad number");
    }
    if (term >= profiles.size()) throw std::invalid_argument(where + ": term index has no profile");
    if (depth < 0) depth = static_cast<int>(stub.size());
    if (static_cast<int>(stub.size()) != depth) {
      throw std::invalid_argument(where + ": stub length differs from earlier rows");
    }
    radius = std::max(radius, static_cast<int>(x.size()));
    tables[term][{std::move(x), std::move(stub)}] = value;
  }
  if (depth < 0) throw std::invalid_argument("symbol CSV has no rows");

  const auto vertices = ball(params, Vertex{}, radius);
  const auto stubs = reduced_words(params, depth);
  for (std::size_t t = 0; t < tables.size(); ++t) {
    if (tables[t].size() != vertices.size() * stubs.size()) {
      throw std::invalid_argument("symbol CSV: term " + std::to_string(t) +
                                  " does not cover ball(o, " + std::to_string(radius) +
                                  ") x depth-" + std::to_string(depth) + " stubs");
    }
  }

  CylSymbol a;
  a.params = params;
  a.depth = depth;
  a.domain_radius = radius;
  a.description = "csv";
  for (std::size_t t = 0; t < tables.size(); ++t) {
    auto shared = std::make_shared<const std::map<Key, cplx>>(std::move(tables[t]));
    a.terms.push_back({[shared](const Vertex& x, std::span<const Color> w) {
                         auto it = shared->find({x.word, Word(w.begin(), w.end())});
                         if (it == shared->end()) throw DomainError("symbol table has no entry");
                         return it->second;
                       },
                       profiles[t]});
  }
  return a;
}

}  // namespace treepsi
