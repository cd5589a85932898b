#include "qbounds/spectral.hpp"

#include <limits>
#include <sstream>

#include "qbounds/errors.hpp"

namespace qbounds {

RealVector SpectralData::clamped() const {
    RealVector p = values.cwiseMax(0.0);
    for (int i = rank; i < p.size(); ++i) p(i) = 0.0;
    return p;
}

ComplexMatrix SpectralData::reconstruct() const {
    return vectors * clamped().cast<Complex>().asDiagonal() * vectors.adjoint();
}

ComplexMatrix SpectralData::to_eigenbasis(const ComplexMatrix& a) const {
    return vectors.adjoint() * a * vectors;
}

ComplexMatrix SpectralData::from_eigenbasis(const ComplexMatrix& a) const {
    return vectors * a * vectors.adjoint();
}

double default_rank_tol(int dim, double max_eigenvalue) {
    return dim * std::numeric_limits<double>::epsilon() * std::max(max_eigenvalue, 0.0);
}

SpectralData eigendecompose(const ComplexMatrix& rho, std::optional<double> rank_tol) {
    if (rho.rows() == 0 || rho.rows() != rho.cols())
        throw Error(ErrorKind::InvalidArgument, "density matrix must be square and non-empty");
    const double residual = hermiticity_residual(rho);
    if (residual > kHermTol) {
        std::ostringstream os;
        os << "max |A - A^dagger| = " << residual;
        throw Error(ErrorKind::NotHermitian, os.str());
    }

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho));
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigSolverFailure, "Hermitian eigensolver did not converge");

    const Eigen::Index d = rho.rows();
    SpectralData out;
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    out.rank_tol = rank_tol.value_or(default_rank_tol(static_cast<int>(d), out.values(0)));
    if (out.rank_tol < 0.0) throw Error(ErrorKind::InvalidArgument, "rank_tol must be non-negative");
    out.rank = 0;
    while (out.rank < d && out.values(out.rank) > out.rank_tol) ++out.rank;
    return out;
}

SpectralData with_forced_rank(SpectralData spectral, int forced_rank) {
    if (forced_rank < 1 || forced_rank > spectral.dim())
        throw Error(ErrorKind::InvalidArgument, "forced rank out of range");
    spectral.rank = forced_rank;
    return spectral;
}

}  // namespace qbounds
