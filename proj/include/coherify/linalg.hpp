#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coherify/matrix.hpp"

namespace coherify {

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // non-increasing
  ComplexMatrix eigenvectors;       // column j belongs to eigenvalues[j]
};

inline constexpr double kHermitianTolerance = 1e-10;

/// Cyclic complex Jacobi. Inputs whose Hermitian defect is below 1e-10 are
/// symmetrized first; larger defects throw NotHermitian. Converges when the
/// off-diagonal Frobenius mass drops below 1e-13 * ||H||_F (cap 100 sweeps,
/// NoConvergence otherwise). Ties in the sorted spectrum keep their original
/// diagonal order.
EigenDecomposition eig_hermitian(const ComplexMatrix& h);

/// Eigenvalues only, non-increasing.
std::vector<double> eigenvalues_hermitian(const ComplexMatrix& h);

/// (X_{ij,kl})^R = X_{ik,jl} for X of size d^2 x d^2.
ComplexMatrix reshuffle(const ComplexMatrix& x, std::size_t d);

/// Row-major flattening: [A_11, A_12, ..., A_1d, A_21, ...].
std::vector<Complex> vectorize(const ComplexMatrix& a);
ComplexMatrix unvectorize(std::span<const Complex> v, std::size_t d);

enum class Subsystem { First, Second };

/// Partial trace of a d^2 x d^2 operator on C^d (x) C^d, index (i,j) -> i*d + j.
ComplexMatrix partial_trace(const ComplexMatrix& x, std::size_t d, Subsystem traced);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// F_jk = exp(2 pi i jk / d) / sqrt(d).
ComplexMatrix fourier_matrix(std::size_t d);

/// Max |(U^dagger U - 1)_ij|.
double unitarity_defect(const ComplexMatrix& u);

/// Unitary factor of the polar decomposition A = W P. Throws NoConvergence
/// when A is numerically singular.
ComplexMatrix polar_unitary(const ComplexMatrix& a);

/// Exact integer square root of n if n is a perfect square, otherwise 0.
std::size_t perfect_sqrt(std::size_t n);

}  // namespace coherify
