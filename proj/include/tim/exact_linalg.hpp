#pragma once

// Exact integer linear algebra. Ranks are over the rationals and computed by
// fraction-free (Bareiss) elimination; a checked 64-bit path is tried first
// and the computation restarts on arbitrary-precision integers on overflow.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tim/graph.hpp"

namespace tim {

using BigInt = boost::multiprecision::cpp_int;
using IntVector = std::vector<BigInt>;

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, T(0)) {}

  static Matrix from_columns(const std::vector<std::vector<T>>& columns, int rows) {
    Matrix m(rows, static_cast<int>(columns.size()));
    for (int c = 0; c < m.cols_; ++c) {
      if (static_cast<int>(columns[c].size()) != rows) throw Error("column dimension mismatch");
      for (int r = 0; r < rows; ++r) m(r, c) = columns[c][r];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  void append_column(const std::vector<T>& col) {
    if (rows_ == 0 && cols_ == 0) rows_ = static_cast<int>(col.size());
    if (static_cast<int>(col.size()) != rows_) throw Error("column dimension mismatch");
    Matrix m(rows_, cols_ + 1);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c);
      m(r, cols_) = col[r];
    }
    *this = std::move(m);
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<BigInt>;
using SmallMatrix = Matrix<std::int64_t>;

namespace detail {

// Fraction-free row echelon reduction; returns the rank. Every intermediate
// entry is a minor of the input, so all divisions are exact.
template <class T>
int bareiss_rank(Matrix<T> m) {
  const int rows = m.rows();
  const int cols = m.cols();
  T prev = 1;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && m(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r)
      for (int j = c; j < cols; ++j) std::swap(m(p, j), m(r, j));
    for (int i = r + 1; i < rows; ++i) {
      for (int j = c + 1; j < cols; ++j) m(i, j) = (m(r, c) * m(i, j) - m(i, c) * m(r, j)) / prev;
      m(i, c) = 0;
    }
    prev = m(r, c);
    ++r;
  }
  return r;
}

inline std::optional<int> bareiss_rank_checked(SmallMatrix m) {
  using i128 = __int128;
  const int rows = m.rows();
  const int cols = m.cols();
  std::int64_t prev = 1;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && m(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r)
      for (int j = c; j < cols; ++j) std::swap(m(p, j), m(r, j));
    for (int i = r + 1; i < rows; ++i) {
      for (int j = c + 1; j < cols; ++j) {
        i128 a = 0, b = 0, d = 0;
        if (__builtin_mul_overflow(static_cast<i128>(m(r, c)), static_cast<i128>(m(i, j)), &a)) return std::nullopt;
        if (__builtin_mul_overflow(static_cast<i128>(m(i, c)), static_cast<i128>(m(r, j)), &b)) return std::nullopt;
        if (__builtin_sub_overflow(a, b, &d)) return std::nullopt;
        i128 q = d / prev;
        if (q > INT64_MAX || q < INT64_MIN) return std::nullopt;
        m(i, j) = static_cast<std::int64_t>(q);
      }
      m(i, c) = 0;
    }
    prev = m(r, c);
    ++r;
  }
  return r;
}

inline IntMatrix widen(const SmallMatrix& m) {
  IntMatrix out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  return out;
}

inline std::optional<SmallMatrix> narrow(const IntMatrix& m) {
  SmallMatrix out(m.rows(), m.cols());
  static const BigInt lo = INT64_MIN;
  static const BigInt hi = INT64_MAX;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      if (m(r, c) < lo || m(r, c) > hi) return std::nullopt;
      out(r, c) = static_cast<std::int64_t>(m(r, c));
    }
  return out;
}

}  // namespace detail

/// Exact rank over Q.
inline int rank(const SmallMatrix& m) {
  if (auto r = detail::bareiss_rank_checked(m)) return *r;
  return detail::bareiss_rank(detail::widen(m));
}

inline int rank(const IntMatrix& m) {
  if (auto small = detail::narrow(m))
    if (auto r = detail::bareiss_rank_checked(*small)) return *r;
  return detail::bareiss_rank(m);
}

/// True iff v lies in the column span of `basis`.
inline bool span_contains(const IntMatrix& basis, const IntVector& v) {
  if (basis.cols() > 0 && static_cast<int>(v.size()) != basis.rows())
    throw Error("span_contains: vector dimension " + std::to_string(v.size()) + " != basis dimension " +
                std::to_string(basis.rows()));
  IntMatrix aug = basis;
  if (basis.cols() == 0) aug = IntMatrix(static_cast<int>(v.size()), 0);
  aug.append_column(v);
  return rank(aug) == rank(basis);
}

enum class VectorKind { BinaryAll, GenericMds };

/// Candidate beamforming vectors: either every nonzero 0-1 vector of a given
/// dimension, or a family where every `dim` members are independent.
struct VectorSet {
  int dim = 0;
  VectorKind kind = VectorKind::BinaryAll;
  std::vector<IntVector> vectors;

  int size() const { return static_cast<int>(vectors.size()); }
};

inline constexpr int kBinaryVectorCap = 16;

/// Bit x of the pattern is coordinate x; patterns enumerated 1 .. 2^c - 1.
inline IntVector binary_vector(int c, std::uint32_t pattern) {
  IntVector v(c);
  for (int x = 0; x < c; ++x) v[x] = (pattern >> x) & 1u;
  return v;
}

inline VectorSet gen_binary_vectors(int c, int cap = kBinaryVectorCap) {
  if (c < 1) throw Error("binary vector dimension must be >= 1");
  if (c > cap) throw Error("binary vector dimension " + std::to_string(c) + " exceeds cap " + std::to_string(cap));
  VectorSet set{c, VectorKind::BinaryAll, {}};
  const std::uint32_t count = (1u << c) - 1u;
  set.vectors.reserve(count);
  for (std::uint32_t p = 1; p <= count; ++p) set.vectors.push_back(binary_vector(c, p));
  return set;
}

namespace detail {

inline bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

inline bool subset_full_rank(const VectorSet& set, const std::vector<int>& idx) {
  std::vector<IntVector> cols;
  for (int i : idx) cols.push_back(set.vectors[i]);
  return rank(IntMatrix::from_columns(cols, set.dim)) == static_cast<int>(idx.size());
}

}  // namespace detail

inline constexpr int kExhaustiveMdsCheck = 12;

/// Vandermonde columns [1, a, a^2, ..., a^(c-1)] with a = 1..s. The MDS
/// property is re-verified: exhaustively for s <= 12, on `samples` random
/// c-subsets otherwise.
inline VectorSet gen_generic_vectors(int c, int s, std::uint64_t seed = 0, int samples = 64) {
  if (c < 1) throw Error("generic vector dimension must be >= 1");
  if (s < c) throw Error("generic vector count must be >= dimension");
  VectorSet set{c, VectorKind::GenericMds, {}};
  for (int a = 1; a <= s; ++a) {
    IntVector v(c);
    BigInt p = 1;
    for (int x = 0; x < c; ++x) {
      v[x] = p;
      p *= a;
    }
    set.vectors.push_back(std::move(v));
  }
  if (s <= kExhaustiveMdsCheck) {
    std::vector<int> idx(c);
    for (int i = 0; i < c; ++i) idx[i] = i;
    do {
      if (!detail::subset_full_rank(set, idx)) throw Error("generic vector set failed MDS verification");
    } while (detail::next_combination(idx, s));
  } else {
    std::mt19937_64 rng(seed);
    std::vector<int> all(s);
    for (int i = 0; i < s; ++i) all[i] = i;
    for (int t = 0; t < samples; ++t) {
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<int> idx(all.begin(), all.begin() + c);
      std::sort(idx.begin(), idx.end());
      if (!detail::subset_full_rank(set, idx)) throw Error("generic vector set failed MDS verification");
    }
  }
  return set;
}

/// One interferer (or the desired transmitter) seen through an n-antenna receiver.
struct LiftedBlock {
  int n = 1;
  std::vector<IntVector> vectors;
};

/// Generic rank of the column concatenation of H_i (x) V_i, with each H_i an
/// n x 1 channel drawn uniformly from [1, 2^31). The maximum over `trials`
/// draws equals the generic rank except with vanishing probability
/// (Schwartz-Zippel).
inline int generic_rank_lifted(const std::vector<LiftedBlock>& blocks, int c, int trials, std::uint64_t seed) {
  if (blocks.empty()) return 0;
  int rows = -1;
  for (const auto& blk : blocks) {
    if (blk.n < 1) throw Error("channel dimension must be >= 1");
    for (const auto& v : blk.vectors)
      if (static_cast<int>(v.size()) != c) throw Error("lifted vector dimension mismatch");
    if (rows < 0) rows = blk.n * c;
    if (rows != blk.n * c) throw Error("all lifted blocks must share the receive dimension");
  }
  // A scalar channel only rescales columns, so no sampling is needed.
  if (rows == c) {
    std::vector<IntVector> cols;
    for (const auto& blk : blocks)
      for (const auto& v : blk.vectors) cols.push_back(v);
    return rank(IntMatrix::from_columns(cols, c));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> gain(1, (std::int64_t{1} << 31) - 1);
  int best = 0;
  for (int t = 0; t < std::max(trials, 1); ++t) {
    std::vector<IntVector> cols;
    for (const auto& blk : blocks) {
      std::vector<std::int64_t> h(blk.n);
      for (auto& x : h) x = gain(rng);
      for (const auto& v : blk.vectors) {
        IntVector col(rows);
        for (int a = 0; a < blk.n; ++a)
          for (int x = 0; x < c; ++x) col[a * c + x] = v[x] * h[a];
        cols.push_back(std::move(col));
      }
    }
    best = std::max(best, rank(IntMatrix::from_columns(cols, rows)));
  }
  return best;
}

}  // namespace tim
