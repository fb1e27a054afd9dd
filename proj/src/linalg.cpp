#include "sccuc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sccuc {

template <typename T>
double DenseMatrix<T>::norm_inf() const {
  double best = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (const T& v : row(r)) sum += std::abs(v);
    best = std::max(best, sum);
  }
  return best;
}

template <typename T>
DenseMatrix<T> operator*(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
  DenseMatrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      if (aik == T{}) continue;
      auto crow = c.row(i);
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

template <typename T>
std::vector<T> operator*(const DenseMatrix<T>& a, std::span<const T> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector product: dimension mismatch");
  std::vector<T> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T acc{};
    auto arow = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) acc += arow[j] * x[j];
    y[i] = acc;
  }
  return y;
}

template <typename T>
double norm_inf(std::span<const T> v) {
  double best = 0.0;
  for (const T& e : v) best = std::max(best, static_cast<double>(std::abs(e)));
  return best;
}

template <typename T>
DenseMatrix<T> LuFactors<T>::lower() const {
  const std::size_t n = size();
  DenseMatrix<T> l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) l(i, j) = lu_(i, j);
    l(i, i) = T{1};
  }
  return l;
}

template <typename T>
DenseMatrix<T> LuFactors<T>::upper() const {
  const std::size_t n = size();
  DenseMatrix<T> u(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) u(i, j) = lu_(i, j);
  return u;
}

template <typename T>
LuFactors<T> lu_factor(const DenseMatrix<T>& a) {
  if (!a.square()) throw DimensionError("lu_factor: matrix is not square");
  const std::size_t n = a.rows();
  LuFactors<T> f;
  f.lu_ = a;
  f.perm_.resize(n);
  std::iota(f.perm_.begin(), f.perm_.end(), std::size_t{0});
  f.norm_ = a.norm_inf();
  const double threshold = kSingularPivotTolerance * f.norm_;
  auto& lu = f.lu_;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double mag = std::abs(lu(i, k));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (best < threshold || best == 0.0) {
      f.singular_ = true;
      f.singular_pivot_ = k;
      return f;
    }
    if (pivot != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(pivot).begin());
      std::swap(f.perm_[k], f.perm_[pivot]);
    }
    const T inv_pivot = T{1} / lu(k, k);
    auto krow = lu.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto irow = lu.row(i);
      const T factor = irow[k] * inv_pivot;
      irow[k] = factor;
      if (factor == T{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) irow[j] -= factor * krow[j];
    }
  }
  return f;
}

namespace {

template <typename T>
void require_solvable(const LuFactors<T>& f) {
  if (f.singular()) {
    throw SingularMatrixError("matrix is singular to working precision (pivot " +
                                  std::to_string(f.singular_pivot()) + ")",
                              f.singular_pivot(), 0.0);
  }
}

template <typename T>
void substitute_in_place(const LuFactors<T>& f, std::vector<T>& y) {
  const auto& lu = f.packed();
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) {
    T acc = y[i];
    auto row = lu.row(i);
    for (std::size_t j = 0; j < i; ++j) acc -= row[j] * y[j];
    y[i] = acc;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    T acc = y[ii];
    auto row = lu.row(ii);
    for (std::size_t j = ii + 1; j < n; ++j) acc -= row[j] * y[j];
    y[ii] = acc / row[ii];
  }
}

}  // namespace

template <typename T>
std::vector<T> solve(const LuFactors<T>& f, std::span<const T> b) {
  require_solvable(f);
  if (b.size() != f.size()) throw DimensionError("solve: right-hand side has wrong length");
  std::vector<T> y(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) y[i] = b[f.perm()[i]];
  substitute_in_place(f, y);
  return y;
}

template <typename T>
DenseMatrix<T> invert(const LuFactors<T>& f) {
  require_solvable(f);
  const std::size_t n = f.size();
  DenseMatrix<T> inv(n, n);
  std::vector<T> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = f.perm()[i] == j ? T{1} : T{};
    substitute_in_place(f, col);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

template <typename T>
DenseMatrix<T> invert(const DenseMatrix<T>& a) {
  return invert(lu_factor(a));
}

#define SCCUC_INSTANTIATE(T)                                                          \
  template class DenseMatrix<T>;                                                      \
  template class LuFactors<T>;                                                        \
  template DenseMatrix<T> operator*(const DenseMatrix<T>&, const DenseMatrix<T>&);    \
  template std::vector<T> operator*(const DenseMatrix<T>&, std::span<const T>);       \
  template double norm_inf(std::span<const T>);                                       \
  template LuFactors<T> lu_factor(const DenseMatrix<T>&);                             \
  template std::vector<T> solve(const LuFactors<T>&, std::span<const T>);             \
  template DenseMatrix<T> invert(const LuFactors<T>&);                                \
  template DenseMatrix<T> invert(const DenseMatrix<T>&);

SCCUC_INSTANTIATE(double)
SCCUC_INSTANTIATE(Complex)

#undef SCCUC_INSTANTIATE

}  // namespace sccuc
