#pragma once

// Addressing and enumeration on the (q+1)-homogeneous tree.
//
// The tree is realized as the Cayley graph of the free product of q+1 copies
// of Z/2: every vertex has exactly one incident edge of each color 0..q, and
// a vertex is the reduced color word read along the geodesic from the
// reference vertex o (the empty word).

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace treepsi {

using Color = std::uint8_t;
using Word = std::vector<Color>;

/// Raised when an enumeration would exceed the configured vertex/stub cap.
class CapExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when an argument lies outside the region an object is defined on.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

inline constexpr std::size_t kDefaultEnumerationCap = 100000;

struct TreeParams {
  int q = 2;
  double tau = 0.0;  // pi / ln q

  static TreeParams make(int q);
  double log_q() const;
};

struct Vertex {
  Word word;

  Vertex() = default;
  explicit Vertex(Word w) : word(std::move(w)) {}

  std::size_t length() const { return word.size(); }
  bool is_root() const { return word.empty(); }
  std::string str() const;

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Base vertex plus a non-backtracking color word leaving it. Names the
/// boundary cylinder of rays from `base` whose first steps follow `stub`.
struct NbWord {
  Vertex base;
  Word stub;

  friend bool operator==(const NbWord&, const NbWord&) = default;
};

std::string word_str(std::span<const Color> w);
/// Parses "0120" style words; throws std::invalid_argument on bad letters or
/// a non-reduced word.
Word parse_word(std::string_view text, int q);
Vertex parse_vertex(std::string_view text, int q);

bool is_reduced(std::span<const Color> w);
Word reversed(std::span<const Color> w);

/// Concatenates two reduced words and cancels equal letters at the junction.
Word reduce_concat(std::span<const Color> a, std::span<const Color> b);

/// Color word of the geodesic from x to y.
Word path_word(const Vertex& x, const Vertex& y);

int distance(const Vertex& x, const Vertex& y);
std::vector<Vertex> geodesic(const Vertex& x, const Vertex& y);

/// Neighbour of x across the edge of color c.
Vertex step(const Vertex& x, Color c);
Vertex step(const Vertex& x, std::span<const Color> path);

std::size_t sphere_size(int q, int n);
std::size_t ball_size(int q, int radius);
/// Number of reduced words of length n, i.e. depth-n cylinders at a vertex.
std::size_t stub_count(int q, int n);

/// All reduced words of the given length, in lexicographic order.
std::vector<Word> reduced_words(const TreeParams& params, int length,
                                std::size_t cap = kDefaultEnumerationCap);

std::vector<Vertex> sphere(const TreeParams& params, const Vertex& x, int n,
                           std::size_t cap = kDefaultEnumerationCap);
std::vector<Vertex> ball(const TreeParams& params, const Vertex& x, int radius,
                         std::size_t cap = kDefaultEnumerationCap);

/// Non-backtracking extensions of w by k letters, lexicographic in the
/// appended letters.
std::vector<NbWord> nb_extensions(const TreeParams& params, const NbWord& w,
                                  int k,
                                  std::size_t cap = kDefaultEnumerationCap);

/// Length of the common prefix of two words.
int common_prefix(std::span<const Color> a, std::span<const Color> b);

/// Lexicographically ordered enumeration of ball(o, radius) with index lookup.
class Ball {
public:
  Ball(const TreeParams& params, int radius,
       std::size_t cap = kDefaultEnumerationCap);

  int radius() const { return radius_; }
  int q() const { return q_; }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& operator[](std::size_t i) const { return vertices_[i]; }

  /// Index of v, or -1 if v lies outside the ball.
  std::ptrdiff_t index_of(const Vertex& v) const;

private:
  int q_;
  int radius_;
  std::vector<Vertex> vertices_;
  std::map<Word, std::size_t> index_;
};

using BallPtr = std::shared_ptr<const Ball>;

}  // namespace treepsi
