#include "zeno/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "zeno/error.hpp"

namespace zeno {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(op) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

// Sum of |H_pq|^2 over p < q.
double off_diagonal_norm2(const ComplexMatrix& h) {
  double s = 0.0;
  for (std::size_t p = 0; p < h.rows(); ++p)
    for (std::size_t q = p + 1; q < h.cols(); ++q) s += std::norm(h(p, q));
  return s;
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_)
    throw Error(ErrorKind::DimensionMismatch, "entry count does not match rows*cols");
  if (!all_finite()) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  if (!all_finite()) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

double ComplexMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(ComplexMatrix lhs, Complex s) { return lhs *= s; }
ComplexMatrix operator*(Complex s, ComplexMatrix rhs) { return rhs *= s; }

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.cols() != rhs.rows())
    throw Error(ErrorKind::DimensionMismatch, "matrix product: inner dimensions differ");
  ComplexMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const Complex a = lhs(i, k);
      if (a == Complex{}) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double hermiticity_defect(const ComplexMatrix& h) {
  if (!h.is_square()) throw Error(ErrorKind::DimensionMismatch, "Hermitian check needs a square matrix");
  double m = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i; j < h.cols(); ++j) m = std::max(m, std::abs(h(i, j) - std::conj(h(j, i))));
  return m;
}

// ---------------------------------------------------------------------------

StateVector::StateVector(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
  for (const auto& a : amps_)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw Error(ErrorKind::InvalidArgument, "state has non-finite amplitudes");
  if (norm2() > 1.0 + kNormTolerance)
    throw Error(ErrorKind::InvalidArgument, "state norm^2 exceeds 1");
}

StateVector::StateVector(std::initializer_list<Complex> amplitudes)
    : StateVector(std::vector<Complex>(amplitudes)) {}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw Error(ErrorKind::DimensionMismatch, "basis index out of range");
  std::vector<Complex> a(dim);
  a[index] = 1.0;
  return StateVector(std::move(a));
}

double StateVector::norm2() const noexcept {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

bool StateVector::is_normalized() const noexcept {
  return std::abs(norm2() - 1.0) <= kNormTolerance;
}

StateVector StateVector::normalized() const {
  // Scale first so that tiny branches do not underflow in norm2().
  double scale = 0.0;
  for (const auto& a : amps_) scale = std::max({scale, std::abs(a.real()), std::abs(a.imag())});
  if (scale == 0.0) throw Error(ErrorKind::InvalidArgument, "cannot normalize the zero vector");
  std::vector<Complex> out(amps_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    out[i] = amps_[i] / scale;
    s += std::norm(out[i]);
  }
  const double inv = 1.0 / std::sqrt(s);
  for (auto& a : out) a *= inv;
  return StateVector(std::move(out));
}

std::vector<Complex> matvec(const ComplexMatrix& m, std::span<const Complex> v) {
  if (m.cols() != v.size()) throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
  std::vector<Complex> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex s{};
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------

ComplexMatrix SpectralDecomposition::reconstruct() const {
  const std::size_t n = dim();
  ComplexMatrix h(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = eigenvectors(i, k) * eigenvalues[k];
      for (std::size_t j = 0; j < n; ++j) h(i, j) += vik * std::conj(eigenvectors(j, k));
    }
  return h;
}

SpectralDecomposition spectral_decompose(const ComplexMatrix& h) {
  if (!h.is_square()) throw Error(ErrorKind::DimensionMismatch, "spectral_decompose needs a square matrix");
  if (h.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "spectral_decompose of an empty matrix");
  const double scale = std::max(1.0, h.max_abs());
  if (const double defect = hermiticity_defect(h); defect > 1e-12 * scale)
    throw Error(ErrorKind::NonHermitian, "max |H_ij - conj(H_ji)| = " + std::to_string(defect));

  const std::size_t n = h.rows();
  // Work on the exactly-Hermitian part so that the rotations stay consistent.
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = h(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));
      a(j, i) = std::conj(a(i, j));
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);

  double frob2 = 0.0;
  for (const auto& z : a.entries()) frob2 += std::norm(z);
  const double tol2 = frob2 * 1e-32;  // off-diagonal Frobenius norm <= 1e-16 ||H||_F

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm2(a) > tol2; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Once |a_pq| is below an ulp of both diagonal entries the rotation
        // cannot change them; zero it directly.
        if (sweep > 3 && std::abs(app) + 1e2 * r == std::abs(app) &&
            std::abs(aqq) + 1e2 * r == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        // Rotate in the basis where column q carries the phase e^{-i alpha},
        // which makes the pivot real and positive.
        const Complex phase = apq / r;  // e^{i alpha}
        const Complex cphase = std::conj(phase);
        const double theta = (aqq - app) / (2.0 * r);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Complex akp = a(k, p);
          const Complex akq = a(k, q) * cphase;
          const Complex new_kp = c * akp - s * akq;
          const Complex new_kq = s * akp + c * akq;
          a(k, p) = new_kp;
          a(p, k) = std::conj(new_kp);
          a(k, q) = new_kq;
          a(q, k) = std::conj(new_kq);
        }
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q) * cphase;
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

ComplexMatrix evolution_operator(const SpectralDecomposition& decomp, double t) {
  const std::size_t n = decomp.dim();
  if (t == 0.0) return ComplexMatrix::identity(n);
  ComplexMatrix k(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    const double x = -decomp.eigenvalues[m] * t;
    const Complex ph(std::cos(x), std::sin(x));
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vi = decomp.eigenvectors(i, m) * ph;
      for (std::size_t j = 0; j < n; ++j) k(i, j) += vi * std::conj(decomp.eigenvectors(j, m));
    }
  }
  return k;
}

ComplexMatrix evolution_increment(const ComplexMatrix& h, const SpectralDecomposition& decomp,
                                  double t) {
  const std::size_t n = decomp.dim();
  if (h.rows() != n || h.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "evolution_increment: H and decomposition differ");

  double radius = 0.0;
  for (double e : decomp.eigenvalues) radius = std::max(radius, std::abs(e));
  const bool peel = radius * std::abs(t) <= 1.0;

  ComplexMatrix inc(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    const double x = -decomp.eigenvalues[m] * t;
    const Complex w = peel ? phase_remainder(x) : phase_increment(x);
    if (w == Complex{}) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vi = decomp.eigenvectors(i, m) * w;
      for (std::size_t j = 0; j < n; ++j) inc(i, j) += vi * std::conj(decomp.eigenvectors(j, m));
    }
  }
  if (peel) {
    const ComplexMatrix h2 = h * h;
    const Complex first(0.0, -t);
    const double second = -0.5 * t * t;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) inc(i, j) += first * h(i, j) + second * h2(i, j);
  }
  return inc;
}

Complex phase_increment(double x) noexcept {
  const double s = std::sin(0.5 * x);
  return {-2.0 * s * s, std::sin(x)};
}

Complex phase_remainder(double x) noexcept {
  if (std::abs(x) > 1.0) {
    const double s = std::sin(0.5 * x);
    return {0.5 * x * x - 2.0 * s * s, std::sin(x) - x};
  }
  // Sum_{n>=3} (ix)^n / n!, real and imaginary parts separately.
  const double x2 = x * x;
  double re = 0.0;
  double im = 0.0;
  double term = -x * x2 / 6.0;  // n = 3: i^3 x^3 / 3! = -i x^3/6
  for (int n = 3; n < 40; ++n) {
    if (n % 2 == 1)
      im += term;
    else
      re += term;
    // (ix)^{n+1}/(n+1)! = (ix)^n/n! * ix/(n+1). `term` is the real
    // coefficient of the n-th term (of i for odd n), so the sign flips
    // going from odd to even n.
    const double next = term * x / (n + 1);
    term = (n % 2 == 1) ? -next : next;
    // The parts differ in size by a factor of x, so each must converge.
    if (std::abs(term) <= 1e-18 * std::min(std::abs(re), std::abs(im))) break;
  }
  return {re, im};
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

}  // namespace zeno
