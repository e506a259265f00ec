#include "treepsi/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace treepsi {

namespace {

constexpr int kMaxQ = 35;  // letters are printed as 0-9a-z

char letter_char(Color c) {
  return c < 10 ? static_cast<char>('0' + c) : static_cast<char>('a' + (c - 10));
}

void require_cap(std::size_t count, std::size_t cap, const char* what) {
  if (count > cap) {
    throw CapExceeded(std::string(what) + ": " + std::to_string(count) +
                      " elements exceeds cap " + std::to_string(cap));
  }
}

void append_reduced(const TreeParams& params, Word& prefix, int remaining,
                    std::vector<Word>& out) {
  if (remaining == 0) {
    out.push_back(prefix);
    return;
  }
  for (int c = 0; c <= params.q; ++c) {
    if (!prefix.empty() && prefix.back() == c) continue;
    prefix.push_back(static_cast<Color>(c));
    append_reduced(params, prefix, remaining - 1, out);
    prefix.pop_back();
  }
}

}  // namespace

TreeParams TreeParams::make(int q) {
  if (q < 2) throw std::invalid_argument("q must be at least 2");
  if (q > kMaxQ) throw std::invalid_argument("q larger than 35 is not supported");
  TreeParams p;
  p.q = q;
  p.tau = std::numbers::pi / std::log(static_cast<double>(q));
  return p;
}

double TreeParams::log_q() const { return std::log(static_cast<double>(q)); }

std::string word_str(std::span<const Color> w) {
  std::string s;
  s.reserve(w.size());
  for (Color c : w) s.push_back(letter_char(c));
  return s;
}

std::string Vertex::str() const { return word_str(word); }

Word parse_word(std::string_view text, int q) {
  Word w;
  w.reserve(text.size());
  for (char ch : text) {
    int c = -1;
    if (ch >= '0' && ch <= '9') c = ch - '0';
    else if (ch >= 'a' && ch <= 'z') c = ch - 'a' + 10;
    if (c < 0 || c > q) {
      throw std::invalid_argument("invalid color letter '" + std::string(1, ch) +
                                  "' for q=" + std::to_string(q));
    }
    w.push_back(static_cast<Color>(c));
  }
  if (!is_reduced(w)) {
    throw std::invalid_argument("word '" + std::string(text) + "' is not reduced");
  }
  return w;
}

Vertex parse_vertex(std::string_view text, int q) { return Vertex(parse_word(text, q)); }

bool is_reduced(std::span<const Color> w) {
  return std::adjacent_find(w.begin(), w.end()) == w.end();
}

Word reversed(std::span<const Color> w) { return Word(w.rbegin(), w.rend()); }

Word reduce_concat(std::span<const Color> a, std::span<const Color> b) {
  std::size_t cancel = 0;
  while (cancel < a.size() && cancel < b.size() &&
         a[a.size() - 1 - cancel] == b[cancel]) {
    ++cancel;
  }
  Word out(a.begin(), a.end() - static_cast<std::ptrdiff_t>(cancel));
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(cancel), b.end());
  return out;
}

Word path_word(const Vertex& x, const Vertex& y) {
  const int p = common_prefix(x.word, y.word);
  Word out;
  out.reserve(x.word.size() + y.word.size() - 2 * static_cast<std::size_t>(p));
  for (std::size_t i = x.word.size(); i > static_cast<std::size_t>(p); --i) {
    out.push_back(x.word[i - 1]);
  }
  out.insert(out.end(), y.word.begin() + p, y.word.end());
  return out;
}

int distance(const Vertex& x, const Vertex& y) {
  const int p = common_prefix(x.word, y.word);
  return static_cast<int>(x.word.size() + y.word.size()) - 2 * p;
}

std::vector<Vertex> geodesic(const Vertex& x, const Vertex& y) {
  const Word path = path_word(x, y);
  std::vector<Vertex> out;
  out.reserve(path.size() + 1);
  out.push_back(x);
  for (Color c : path) out.push_back(step(out.back(), c));
  return out;
}

Vertex step(const Vertex& x, Color c) {
  Vertex v = x;
  if (!v.word.empty() && v.word.back() == c) v.word.pop_back();
  else v.word.push_back(c);
  return v;
}

Vertex step(const Vertex& x, std::span<const Color> path) {
  return Vertex(reduce_concat(x.word, path));
}

std::size_t sphere_size(int q, int n) {
  if (n == 0) return 1;
  std::size_t count = static_cast<std::size_t>(q) + 1;
  for (int i = 1; i < n; ++i) count *= static_cast<std::size_t>(q);
  return count;
}

std::size_t ball_size(int q, int radius) {
  std::size_t total = 0;
  for (int n = 0; n <= radius; ++n) total += sphere_size(q, n);
  return total;
}

std::size_t stub_count(int q, int n) { return sphere_size(q, n); }

std::vector<Word> reduced_words(const TreeParams& params, int length, std::size_t cap) {
  if (length < 0) throw std::invalid_argument("word length must be nonnegative");
  require_cap(stub_count(params.q, length), cap, "reduced_words");
  std::vector<Word> out;
  out.reserve(stub_count(params.q, length));
  Word prefix;
  append_reduced(params, prefix, length, out);
  return out;
}

std::vector<Vertex> sphere(const TreeParams& params, const Vertex& x, int n,
                           std::size_t cap) {
  if (n < 0) throw std::invalid_argument("sphere radius must be nonnegative");
  require_cap(sphere_size(params.q, n), cap, "sphere");
  std::vector<Vertex> out;
  for (const Word& u : reduced_words(params, n, cap)) out.push_back(step(x, u));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Vertex> ball(const TreeParams& params, const Vertex& x, int radius,
                         std::size_t cap) {
  if (radius < 0) throw std::invalid_argument("ball radius must be nonnegative");
  require_cap(ball_size(params.q, radius), cap, "ball");
  std::vector<Vertex> out;
  for (int n = 0; n <= radius; ++n) {
    for (const Word& u : reduced_words(params, n, cap)) out.push_back(step(x, u));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NbWord> nb_extensions(const TreeParams& params, const NbWord& w, int k,
                                  std::size_t cap) {
  if (k < 0) throw std::invalid_argument("extension length must be nonnegative");
  std::size_t count = 1;
  if (k > 0) {
    count = w.stub.empty() ? stub_count(params.q, k)
                           : static_cast<std::size_t>(std::pow(params.q, k));
  }
  require_cap(count, cap, "nb_extensions");

  std::vector<NbWord> out;
  out.reserve(count);
  std::vector<Word> words;
  words.reserve(count);
  Word prefix = w.stub;
  append_reduced(params, prefix, k, words);
  for (Word& s : words) out.push_back(NbWord{w.base, std::move(s)});
  return out;
}

int common_prefix(std::span<const Color> a, std::span<const Color> b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return static_cast<int>(i);
}

Ball::Ball(const TreeParams& params, int radius, std::size_t cap)
    : q_(params.q), radius_(radius), vertices_(ball(params, Vertex{}, radius, cap)) {
  for (std::size_t i = 0; i < vertices_.size(); ++i) index_.emplace(vertices_[i].word, i);
}

std::ptrdiff_t Ball::index_of(const Vertex& v) const {
  auto it = index_.find(v.word);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

}  // namespace treepsi
