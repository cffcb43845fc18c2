#pragma once

// Dense and banded matrix sections over Real or double.
//
// Sections of infinite operator matrices are stored with exact zeros outside
// their band, so structural zero patterns survive products.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jfp/errors.hpp"
#include "jfp/real.hpp"

namespace jfp {

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const mp::Real& v) { return v.is_zero(); }
inline double to_double(double v) { return v; }
inline double to_double(const mp::Real& v) { return v.to_double(); }
/// acc += a * b
inline void fma_acc(double& acc, double a, double b) { acc += a * b; }
inline void fma_acc(mp::Real& acc, const mp::Real& a, const mp::Real& b) { acc.fma_add(a, b); }

/// Column-major dense matrix.
template <class T>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static Dense identity(std::size_t n) {
    Dense m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  /// Leading r x c block.
  Dense block(std::size_t r, std::size_t c) const {
    Dense out(r, c);
    for (std::size_t j = 0; j < c && j < cols_; ++j)
      for (std::size_t i = 0; i < r && i < rows_; ++i) out(i, j) = (*this)(i, j);
    return out;
  }

  Dense transpose() const {
    Dense out(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) out(j, i) = (*this)(i, j);
    return out;
  }

  /// Bandwidths (lower, upper) of the nonzero pattern; -1 when empty.
  std::pair<long, long> bandwidths() const {
    long lo = -static_cast<long>(cols_), up = -static_cast<long>(rows_);
    bool any = false;
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i)
        if (!is_zero((*this)(i, j))) {
          any = true;
          lo = std::max(lo, static_cast<long>(i) - static_cast<long>(j));
          up = std::max(up, static_cast<long>(j) - static_cast<long>(i));
        }
    if (!any) return {-1, -1};
    return {lo, up};
  }

  Dense<double> to_double_matrix() const {
    Dense<double> out(rows_, cols_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) out(i, j) = jfp::to_double((*this)(i, j));
    return out;
  }

  Dense& operator+=(const Dense& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Dense& operator-=(const Dense& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Dense& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend Dense operator+(Dense a, const Dense& b) { return a += b; }
  friend Dense operator-(Dense a, const Dense& b) { return a -= b; }
  friend Dense operator*(Dense a, const T& s) { return a *= s; }

  /// Product skipping exact zeros of the left factor.
  friend Dense operator*(const Dense& a, const Dense& b) {
    if (a.cols_ != b.rows_) throw InternalError("dense product: shape mismatch");
    Dense out(a.rows_, b.cols_);
    for (std::size_t j = 0; j < b.cols_; ++j)
      for (std::size_t l = 0; l < a.cols_; ++l) {
        const T& blj = b(l, j);
        if (is_zero(blj)) continue;
        for (std::size_t i = 0; i < a.rows_; ++i) {
          const T& ail = a(i, l);
          if (is_zero(ail)) continue;
          fma_acc(out(i, j), ail, blj);
        }
      }
    return out;
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    if (x.size() != cols_) throw InternalError("dense apply: shape mismatch");
    std::vector<T> y(rows_, T(0));
    for (std::size_t j = 0; j < cols_; ++j) {
      if (is_zero(x[j])) continue;
      for (std::size_t i = 0; i < rows_; ++i)
        if (!is_zero((*this)(i, j))) fma_acc(y[i], (*this)(i, j), x[j]);
    }
    return y;
  }

  T max_abs() const {
    T m(0);
    for (const auto& v : data_) {
      T a = v < T(0) ? T(-v) : v;
      if (m < a) m = a;
    }
    return m;
  }

 private:
  void check_same(const Dense& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InternalError("dense: shape mismatch");
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

/// Banded section with bandwidths (lower, upper): entry (i,j) is a structural
/// zero when i - j > lower or j - i > upper.
template <class T>
class Banded {
 public:
  Banded() = default;
  Banded(std::size_t rows, std::size_t cols, long lower, long upper)
      : rows_(rows), cols_(cols), lower_(lower), upper_(upper),
        data_(cols * static_cast<std::size_t>(std::max(0L, lower + upper + 1)), T(0)) {
    if (lower + upper < 0) throw InternalError("banded: empty band");
  }

  static Banded identity(std::size_t n) {
    Banded m(n, n, 0, 0);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  long lower() const { return lower_; }
  long upper() const { return upper_; }

  bool in_band(std::size_t i, std::size_t j) const {
    long d = static_cast<long>(i) - static_cast<long>(j);
    return i < rows_ && j < cols_ && d <= lower_ && -d <= upper_;
  }

  T get(std::size_t i, std::size_t j) const { return in_band(i, j) ? data_[index(i, j)] : T(0); }

  T& at(std::size_t i, std::size_t j) {
    if (!in_band(i, j))
      throw InternalError("banded: (" + std::to_string(i) + "," + std::to_string(j) + ") outside band");
    return data_[index(i, j)];
  }
  const T& at(std::size_t i, std::size_t j) const {
    if (!in_band(i, j))
      throw InternalError("banded: (" + std::to_string(i) + "," + std::to_string(j) + ") outside band");
    return data_[index(i, j)];
  }

  /// Row range [first, last) of the band in column j.
  std::size_t col_begin(std::size_t j) const {
    long r = static_cast<long>(j) - upper_;
    return static_cast<std::size_t>(std::max(0L, r));
  }
  std::size_t col_end(std::size_t j) const {
    long r = static_cast<long>(j) + lower_ + 1;
    return static_cast<std::size_t>(std::clamp(r, 0L, static_cast<long>(rows_)));
  }

  /// Leading section with the same band.
  Banded block(std::size_t r, std::size_t c) const {
    Banded out(r, c, lower_, upper_);
    for (std::size_t j = 0; j < c && j < cols_; ++j)
      for (std::size_t i = out.col_begin(j); i < out.col_end(j) && i < rows_; ++i) out.at(i, j) = at(i, j);
    return out;
  }

  Dense<T> to_dense() const {
    Dense<T> out(rows_, cols_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = col_begin(j); i < col_end(j); ++i) out(i, j) = at(i, j);
    return out;
  }

  Banded<double> to_double_banded() const {
    Banded<double> out(rows_, cols_, lower_, upper_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = col_begin(j); i < col_end(j); ++i) out.at(i, j) = jfp::to_double(at(i, j));
    return out;
  }

  Banded& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  /// Sum of two sections; the result band is the union of both bands.
  friend Banded operator+(const Banded& a, const Banded& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InternalError("banded sum: shape mismatch");
    Banded out(a.rows_, a.cols_, std::max(a.lower_, b.lower_), std::max(a.upper_, b.upper_));
    for (std::size_t j = 0; j < a.cols_; ++j) {
      for (std::size_t i = a.col_begin(j); i < a.col_end(j); ++i) out.at(i, j) += a.at(i, j);
      for (std::size_t i = b.col_begin(j); i < b.col_end(j); ++i) out.at(i, j) += b.at(i, j);
    }
    return out;
  }
  friend Banded operator-(const Banded& a, const Banded& b) {
    Banded nb = b;
    nb *= T(-1);
    return a + nb;
  }

  /// Section product. Entries near the trailing edge are affected by
  /// truncation whenever the sum index can leave the section.
  friend Banded operator*(const Banded& a, const Banded& b) {
    if (a.cols_ != b.rows_) throw InternalError("banded product: shape mismatch");
    Banded out(a.rows_, b.cols_, a.lower_ + b.lower_, a.upper_ + b.upper_);
    for (std::size_t j = 0; j < b.cols_; ++j)
      for (std::size_t l = b.col_begin(j); l < b.col_end(j); ++l) {
        const T& blj = b.at(l, j);
        if (is_zero(blj)) continue;
        for (std::size_t i = a.col_begin(l); i < a.col_end(l); ++i) fma_acc(out.at(i, j), a.at(i, l), blj);
      }
    return out;
  }

  friend Dense<T> operator*(const Banded& a, const Dense<T>& b) {
    if (a.cols_ != b.rows()) throw InternalError("banded*dense: shape mismatch");
    Dense<T> out(a.rows_, b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t l = 0; l < b.rows(); ++l) {
        const T& blj = b(l, j);
        if (is_zero(blj)) continue;
        for (std::size_t i = a.col_begin(l); i < a.col_end(l); ++i) fma_acc(out(i, j), a.at(i, l), blj);
      }
    return out;
  }

  friend Dense<T> operator*(const Dense<T>& a, const Banded& b) {
    if (a.cols() != b.rows_) throw InternalError("dense*banded: shape mismatch");
    Dense<T> out(a.rows(), b.cols_);
    for (std::size_t j = 0; j < b.cols_; ++j)
      for (std::size_t l = b.col_begin(j); l < b.col_end(j); ++l) {
        const T& blj = b.at(l, j);
        if (is_zero(blj)) continue;
        for (std::size_t i = 0; i < a.rows(); ++i) {
          const T& ail = a(i, l);
          if (is_zero(ail)) continue;
          fma_acc(out(i, j), ail, blj);
        }
      }
    return out;
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    if (x.size() != cols_) throw InternalError("banded apply: shape mismatch");
    std::vector<T> y(rows_, T(0));
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = col_begin(j); i < col_end(j); ++i) fma_acc(y[i], at(i, j), x[j]);
    return y;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    return j * static_cast<std::size_t>(lower_ + upper_ + 1) +
           static_cast<std::size_t>(static_cast<long>(i) - static_cast<long>(j) + upper_);
  }

  std::size_t rows_ = 0, cols_ = 0;
  long lower_ = 0, upper_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Dense<mp::Real>;
using RealBanded = Banded<mp::Real>;

}  // namespace jfp
