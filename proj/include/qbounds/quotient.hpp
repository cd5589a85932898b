#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qbounds/linalg.hpp"
#include "qbounds/spectral.hpp"

namespace qbounds {

/// One basis operator of the quotient space written in the eigenbasis of rho:
/// at most two nonzero entries (row, col, value).
struct FrameElement {
    struct Entry {
        int row;
        int col;
        Complex value;
    };
    std::array<Entry, 2> entries;
    int count = 0;
};

/// Orthonormal Hermitian basis of the operators that matter for a state of
/// rank r: everything except the kernel-kernel block.
///
/// Order: r projectors; symmetric then antisymmetric support pairs (i < j < r,
/// index j(j-1)/2 + i within the group); symmetric then antisymmetric
/// support-kernel pairs (i < r <= k, index r(k - r) + i within the group).
struct QuotientFrame {
    int d = 0;
    int r = 0;
    int dt = 0;
    SpectralData spectral;
    std::vector<FrameElement> elements;

    /// Dense basis operator in the original basis.
    ComplexMatrix basis(int i) const;
    /// Same operator in the eigenbasis of rho.
    ComplexMatrix basis_eigen(int i) const;
};

QuotientFrame build_frame(const SpectralData& spectral);

/// Components Tr[A lambda_i].
RealVector vectorize(const ComplexMatrix& a, const QuotientFrame& frame);
/// Same, with A already expressed in the eigenbasis.
RealVector vectorize_eigen(const ComplexMatrix& a_eigen, const QuotientFrame& frame);
/// Sum_i x_i lambda_i in the original basis (kernel-kernel block zero).
ComplexMatrix devectorize(const RealVector& x, const QuotientFrame& frame);

/// Gram matrix S_ij = Tr[lambda_i lambda_j rho] from its block structure,
/// cross-checked entrywise against direct evaluation with the actual rho.
/// Throws BlockMismatch when the two disagree beyond `tol`.
ComplexMatrix build_gram(const QuotientFrame& frame, const ComplexMatrix& rho, double tol = 1e-10);

/// Closed-form blocks only.
ComplexMatrix gram_closed_form(const QuotientFrame& frame);
/// Direct Tr[lambda_i lambda_j rho].
ComplexMatrix gram_direct(const QuotientFrame& frame, const ComplexMatrix& rho);

/// R with S = R^dagger R from the eigendecomposition of S, keeping eigenvalues
/// above `tol` (default 1e-12 * largest). Throws NotPsd below -1e-8.
ComplexMatrix factor_gram(const ComplexMatrix& s, std::optional<double> tol = std::nullopt);

}  // namespace qbounds
