#pragma once

// Dense complex linear algebra for the small Hilbert spaces used by the
// measurement-cycle engine. Everything here is a value type; nothing is
// shared or mutated after construction.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace zeno {

using Complex = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Complex> entries() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  /// Largest entry modulus, max_ij |A_ij|.
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(ComplexMatrix lhs, Complex s);
ComplexMatrix operator*(Complex s, ComplexMatrix rhs);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// max_ij |A_ij - B_ij|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// max_ij |H_ij - conj(H_ji)|
double hermiticity_defect(const ComplexMatrix& h);

/// Amplitude vector. Sub-normalized vectors are allowed (unnormalized
/// post-selected branches); norm^2 may never exceed 1 + 1e-12.
class StateVector {
 public:
  static constexpr double kNormTolerance = 1e-12;

  StateVector() = default;
  explicit StateVector(std::vector<Complex> amplitudes);
  StateVector(std::initializer_list<Complex> amplitudes);

  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amps_.size(); }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }

  double norm2() const noexcept;
  bool is_normalized() const noexcept;
  /// Unit-norm copy. Throws on the zero vector.
  StateVector normalized() const;

 private:
  std::vector<Complex> amps_;
};

/// Matrix-vector product. The result is not range-checked against the
/// StateVector norm bound, so it is returned as raw amplitudes.
std::vector<Complex> matvec(const ComplexMatrix& m, std::span<const Complex> v);

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // column k pairs with eigenvalues[k]

  std::size_t dim() const noexcept { return eigenvalues.size(); }
  /// Sum_k E_k v_k v_k^dagger
  ComplexMatrix reconstruct() const;
};

/// Cyclic complex Jacobi. Throws NonHermitian or DimensionMismatch.
SpectralDecomposition spectral_decompose(const ComplexMatrix& h);

/// K(t) = exp(-i H t) = Sum_k exp(-i E_k t) v_k v_k^dagger.
ComplexMatrix evolution_operator(const SpectralDecomposition& decomp, double t);

/// K(t) - I without ever forming 1 + small in working precision.
///
/// For |t| * spectral_radius <= 1 the first two Taylor orders are taken
/// from `h` itself, -i t H - t^2 H^2 / 2, and only the remainder comes from
/// the eigenbasis. This keeps the leading terms of every entry exact to a
/// few ulps of their own size, including the ones whose eigenbasis
/// reconstruction would be pure rounding noise (e.g. <e|H|e> = 0). For
/// longer times the plain eigenbasis sum of phase increments is used.
/// `decomp` must be the decomposition of `h`.
ComplexMatrix evolution_increment(const ComplexMatrix& h, const SpectralDecomposition& decomp,
                                  double t);

/// e^{ix} - 1 evaluated as (-2 sin^2(x/2), sin x).
Complex phase_increment(double x) noexcept;

/// e^{ix} - 1 - ix + x^2/2, accurate to a few ulps of its own magnitude.
Complex phase_remainder(double x) noexcept;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace zeno
