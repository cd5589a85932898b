#pragma once

#include <optional>

#include "qbounds/linalg.hpp"

namespace qbounds {

/// Eigendecomposition of a density matrix with a numerical rank.
///
/// Eigenvalues are sorted in non-increasing order; the first `rank` columns
/// of `vectors` span the support, the rest span the kernel. Eigenvalues at or
/// below `rank_tol` are treated as exact zeros by every consumer (see
/// `clamped()`).
struct SpectralData {
    RealVector values;
    ComplexMatrix vectors;
    int rank = 0;
    double rank_tol = 0.0;

    int dim() const { return static_cast<int>(values.size()); }

    /// Eigenvalues with the kernel part set to exactly zero.
    RealVector clamped() const;

    /// U diag(clamped) U^dagger.
    ComplexMatrix reconstruct() const;

    /// Expresses an operator in the eigenbasis: U^dagger A U.
    ComplexMatrix to_eigenbasis(const ComplexMatrix& a) const;
    ComplexMatrix from_eigenbasis(const ComplexMatrix& a) const;
};

/// Default numerical-rank threshold: d * machine epsilon * largest eigenvalue.
double default_rank_tol(int dim, double max_eigenvalue);

/// Hermitian eigendecomposition with rank detection. Throws NotHermitian when
/// the input fails the symmetry check and EigSolverFailure on non-convergence.
SpectralData eigendecompose(const ComplexMatrix& rho, std::optional<double> rank_tol = std::nullopt);

/// Same decomposition with the rank forced to `forced_rank` (1 <= forced_rank <= d).
/// Used to build full-space frames for cross-checks.
SpectralData with_forced_rank(SpectralData spectral, int forced_rank);

}  // namespace qbounds
