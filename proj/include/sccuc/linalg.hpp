#pragma once

// Dense row-major matrices with LU (partial pivoting), solves and inversion.
// Sized for networks of a few hundred buses; no sparsity handling.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sccuc {

using Complex = std::complex<double>;

class SingularMatrixError : public std::runtime_error {
public:
  SingularMatrixError(const std::string& what, std::size_t pivot_index, double pivot_magnitude)
      : std::runtime_error(what), pivot_index_(pivot_index), pivot_magnitude_(pivot_magnitude) {}
  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double pivot_magnitude() const noexcept { return pivot_magnitude_; }

private:
  std::size_t pivot_index_;
  double pivot_magnitude_;
};

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

template <typename T>
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<T>& data() const noexcept { return data_; }

  /// Maximum absolute row sum.
  double norm_inf() const;

  bool operator==(const DenseMatrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using CMatrix = DenseMatrix<Complex>;
using RMatrix = DenseMatrix<double>;

template <typename T>
DenseMatrix<T> operator*(const DenseMatrix<T>& a, const DenseMatrix<T>& b);

template <typename T>
std::vector<T> operator*(const DenseMatrix<T>& a, std::span<const T> x);

template <typename T>
double norm_inf(std::span<const T> v);

/// Packed LU factors of a square matrix: P*A = L*U with unit-diagonal L stored
/// below the diagonal and U on and above it.
template <typename T>
class LuFactors {
public:
  std::size_t size() const noexcept { return lu_.rows(); }
  const DenseMatrix<T>& packed() const noexcept { return lu_; }
  /// perm()[i] is the row of A that ended up in row i of P*A.
  const std::vector<std::size_t>& perm() const noexcept { return perm_; }
  bool singular() const noexcept { return singular_; }
  std::size_t singular_pivot() const noexcept { return singular_pivot_; }
  double matrix_norm() const noexcept { return norm_; }

  DenseMatrix<T> lower() const;
  DenseMatrix<T> upper() const;

private:
  template <typename U>
  friend LuFactors<U> lu_factor(const DenseMatrix<U>& a);

  DenseMatrix<T> lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
  std::size_t singular_pivot_ = 0;
  double norm_ = 0.0;
};

/// Relative pivot threshold below which a matrix is treated as singular.
inline constexpr double kSingularPivotTolerance = 1e-12;

/// Factorizes a square matrix. Never throws on singularity: the returned
/// factors carry the flag and refuse to solve.
template <typename T>
LuFactors<T> lu_factor(const DenseMatrix<T>& a);

/// Throws SingularMatrixError if the factors are flagged singular and
/// DimensionError if b has the wrong length.
template <typename T>
std::vector<T> solve(const LuFactors<T>& f, std::span<const T> b);

template <typename T>
DenseMatrix<T> invert(const DenseMatrix<T>& a);

template <typename T>
DenseMatrix<T> invert(const LuFactors<T>& f);

}  // namespace sccuc
