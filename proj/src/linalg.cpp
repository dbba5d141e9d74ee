#include "coherify/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "coherify/error.hpp"

namespace coherify {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalRelTol = 1e-13;

double off_diagonal_mass(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (r != c) s += std::norm(a(r, c));
    }
  }
  return std::sqrt(s);
}

void require_square(const ComplexMatrix& a, const char* op) {
  if (!a.is_square()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(op) + " needs a square matrix");
  }
}

void require_bipartite(const ComplexMatrix& x, std::size_t d, const char* op) {
  if (d == 0 || !x.is_square() || x.rows() != d * d) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(op) + ": expected " + std::to_string(d * d) + "x" +
                    std::to_string(d * d) + ", got " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()));
  }
}

// One Jacobi rotation zeroing a(p,q). The 2x2 plane rotation is
// G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] with phi = arg a(p,q), which
// first makes the pivot real and then applies the real symmetric rotation.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const Complex phase = apq / r;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = 0.5 * std::atan2(2.0 * r, aqq - app);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex gqp = -s * std::conj(phase);  // G(q,p)
  const Complex gqq = c * std::conj(phase);   // G(q,q)
  const std::size_t n = a.rows();

  // Columns: A <- A G.
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = c * akp + gqp * akq;
    a(k, q) = s * akp + gqq * akq;
  }
  // Rows: A <- G^dagger A.
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk + std::conj(gqp) * aqk;
    a(q, k) = s * apk + std::conj(gqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp + gqp * vkq;
    v(k, q) = s * vkp + gqq * vkq;
  }
}

}  // namespace

EigenDecomposition eig_hermitian(const ComplexMatrix& h) {
  require_square(h, "eig_hermitian");
  const double defect = h.hermitian_defect();
  if (defect > kHermitianTolerance) {
    throw Error(ErrorKind::NotHermitian, "asymmetry " + std::to_string(defect));
  }
  const std::size_t n = h.rows();
  ComplexMatrix a = 0.5 * (h + h.adjoint());
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = a.frobenius_norm();
  const double target = kOffDiagonalRelTol * scale;
  int sweep = 0;
  while (off_diagonal_mass(a) > target) {
    if (++sweep > kMaxSweeps) {
      throw Error(ErrorKind::NoConvergence, "Jacobi sweeps exhausted");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]).real();
    for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, j) = v(k, order[j]);
  }
  return out;
}

std::vector<double> eigenvalues_hermitian(const ComplexMatrix& h) {
  return eig_hermitian(h).eigenvalues;
}

ComplexMatrix reshuffle(const ComplexMatrix& x, std::size_t d) {
  require_bipartite(x, d, "reshuffle");
  ComplexMatrix out(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l < d; ++l) out(i * d + k, j * d + l) = x(i * d + j, k * d + l);
      }
    }
  }
  return out;
}

std::vector<Complex> vectorize(const ComplexMatrix& a) {
  require_square(a, "vectorize");
  return {a.data().begin(), a.data().end()};
}

ComplexMatrix unvectorize(std::span<const Complex> v, std::size_t d) {
  if (v.size() != d * d) {
    throw Error(ErrorKind::DimensionMismatch,
                "unvectorize: length " + std::to_string(v.size()) + " is not " + std::to_string(d) + "^2");
  }
  return ComplexMatrix(d, d, std::vector<Complex>(v.begin(), v.end()));
}

ComplexMatrix partial_trace(const ComplexMatrix& x, std::size_t d, Subsystem traced) {
  require_bipartite(x, d, "partial_trace");
  ComplexMatrix out(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      Complex s = 0.0;
      for (std::size_t m = 0; m < d; ++m) {
        s += traced == Subsystem::First ? x(m * d + a, m * d + b) : x(a * d + m, b * d + m);
      }
      out(a, b) = s;
    }
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      for (std::size_t j = 0; j < b.rows(); ++j) {
        for (std::size_t l = 0; l < b.cols(); ++l) {
          out(i * b.rows() + j, k * b.cols() + l) = aik * b(j, l);
        }
      }
    }
  }
  return out;
}

ComplexMatrix fourier_matrix(std::size_t d) {
  ComplexMatrix f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      // Reduce jk mod d first so the angle stays exact for small d.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / static_cast<double>(d);
      f(j, k) = std::polar(norm, angle);
    }
  }
  return f;
}

double unitarity_defect(const ComplexMatrix& u) {
  require_square(u, "unitarity_defect");
  return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.rows()));
}

ComplexMatrix polar_unitary(const ComplexMatrix& a) {
  require_square(a, "polar_unitary");
  const auto eig = eig_hermitian(a.adjoint() * a);
  const std::size_t n = a.rows();
  if (eig.eigenvalues.back() <= 1e-14 * std::max(1.0, eig.eigenvalues.front())) {
    throw Error(ErrorKind::NoConvergence, "polar_unitary: matrix is numerically singular");
  }
  // (A^dagger A)^{-1/2} = V diag(1/sqrt(lambda)) V^dagger
  ComplexMatrix scaled = eig.eigenvectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double f = 1.0 / std::sqrt(eig.eigenvalues[j]);
    for (std::size_t k = 0; k < n; ++k) scaled(k, j) *= f;
  }
  return a * (scaled * eig.eigenvectors.adjoint());
}

std::size_t perfect_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? r : 0;
}

}  // namespace coherify
