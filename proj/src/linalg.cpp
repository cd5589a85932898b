#include "qbounds/linalg.hpp"

#include <algorithm>

namespace qbounds {

double hermiticity_residual(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
    return max_abs(a - a.adjoint());
}

bool is_hermitian(const ComplexMatrix& a, double tol) { return hermiticity_residual(a) <= tol; }

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.transpose().array() * b.array()).sum();
}

double trace_norm(const RealMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<RealMatrix> svd(a);
    return svd.singularValues().sum();
}

RealMatrix symmetric_sqrt(const RealMatrix& a) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(a);
    RealVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const RealMatrix& sym) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const RealMatrix& sym) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double min_eigenvalue(const ComplexMatrix& herm) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

RealMatrix real_embedding(const ComplexMatrix& h) {
    const Eigen::Index n = h.rows();
    RealMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h.real();
    out.topRightCorner(n, n) = -h.imag();
    out.bottomLeftCorner(n, n) = h.imag();
    out.bottomRightCorner(n, n) = h.real();
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix unitary_exp(const ComplexMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
    const RealVector& e = es.eigenvalues();
    ComplexVector phases(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) phases(i) = std::polar(1.0, -e(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace qbounds
