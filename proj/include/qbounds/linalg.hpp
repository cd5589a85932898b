#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qbounds {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermTol = 1e-12;

/// Largest absolute entry; zero for empty matrices.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol = kHermTol);
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// Tr[A B] without forming the product.
Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Sum of singular values.
double trace_norm(const RealMatrix& a);

/// Symmetric square root of a symmetric PSD matrix (negative eigenvalues clamped).
RealMatrix symmetric_sqrt(const RealMatrix& a);

double min_eigenvalue(const RealMatrix& sym);
double max_eigenvalue(const RealMatrix& sym);
double min_eigenvalue(const ComplexMatrix& herm);

/// Standard Hermitian-to-real-symmetric embedding H -> [[Re H, -Im H], [Im H, Re H]].
/// The spectrum of the result is the spectrum of H with every multiplicity doubled.
RealMatrix real_embedding(const ComplexMatrix& h);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// exp(-i H) for Hermitian H via its eigendecomposition.
ComplexMatrix unitary_exp(const ComplexMatrix& h);

}  // namespace qbounds
