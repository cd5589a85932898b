#include "qbounds/quotient.hpp"

#include <cmath>
#include <sstream>

#include "qbounds/errors.hpp"

namespace qbounds {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kI(0.0, 1.0);

FrameElement projector(int i) {
    FrameElement e;
    e.entries[0] = {i, i, Complex(1.0, 0.0)};
    e.count = 1;
    return e;
}

FrameElement symmetric_pair(int i, int j) {
    FrameElement e;
    e.entries[0] = {i, j, Complex(kInvSqrt2, 0.0)};
    e.entries[1] = {j, i, Complex(kInvSqrt2, 0.0)};
    e.count = 2;
    return e;
}

// i(|i><j| - |j><i|)/sqrt2, so that Tr[A lambda] = sqrt2 Im A_ij.
FrameElement antisymmetric_pair(int i, int j) {
    FrameElement e;
    e.entries[0] = {i, j, kI * kInvSqrt2};
    e.entries[1] = {j, i, -kI * kInvSqrt2};
    e.count = 2;
    return e;
}

}  // namespace

ComplexMatrix QuotientFrame::basis_eigen(int i) const {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    const FrameElement& e = elements.at(i);
    for (int k = 0; k < e.count; ++k) m(e.entries[k].row, e.entries[k].col) = e.entries[k].value;
    return m;
}

ComplexMatrix QuotientFrame::basis(int i) const { return spectral.from_eigenbasis(basis_eigen(i)); }

QuotientFrame build_frame(const SpectralData& spectral) {
    const int d = spectral.dim();
    const int r = spectral.rank;
    if (r < 1 || r > d) throw Error(ErrorKind::InvalidArgument, "rank must satisfy 1 <= r <= d");
    QuotientFrame f;
    f.d = d;
    f.r = r;
    f.dt = 2 * d * r - r * r;
    f.spectral = spectral;
    f.elements.reserve(f.dt);
    for (int i = 0; i < r; ++i) f.elements.push_back(projector(i));
    for (int j = 1; j < r; ++j)
        for (int i = 0; i < j; ++i) f.elements.push_back(symmetric_pair(i, j));
    for (int j = 1; j < r; ++j)
        for (int i = 0; i < j; ++i) f.elements.push_back(antisymmetric_pair(i, j));
    for (int k = r; k < d; ++k)
        for (int i = 0; i < r; ++i) f.elements.push_back(symmetric_pair(i, k));
    for (int k = r; k < d; ++k)
        for (int i = 0; i < r; ++i) f.elements.push_back(antisymmetric_pair(i, k));
    return f;
}

RealVector vectorize_eigen(const ComplexMatrix& a, const QuotientFrame& frame) {
    if (a.rows() != frame.d || a.cols() != frame.d)
        throw Error(ErrorKind::DimensionMismatch, "operator dimension does not match the frame");
    RealVector x(frame.dt);
    for (int n = 0; n < frame.dt; ++n) {
        const FrameElement& e = frame.elements[n];
        // Tr[A lambda] = sum_{(r,c)} lambda(r,c) A(c,r)
        Complex t = 0.0;
        for (int k = 0; k < e.count; ++k) t += e.entries[k].value * a(e.entries[k].col, e.entries[k].row);
        x(n) = t.real();
    }
    return x;
}

RealVector vectorize(const ComplexMatrix& a, const QuotientFrame& frame) {
    return vectorize_eigen(frame.spectral.to_eigenbasis(a), frame);
}

ComplexMatrix devectorize(const RealVector& x, const QuotientFrame& frame) {
    if (x.size() != frame.dt) throw Error(ErrorKind::DimensionMismatch, "vector length does not match the frame");
    ComplexMatrix m = ComplexMatrix::Zero(frame.d, frame.d);
    for (int n = 0; n < frame.dt; ++n) {
        const FrameElement& e = frame.elements[n];
        for (int k = 0; k < e.count; ++k) m(e.entries[k].row, e.entries[k].col) += x(n) * e.entries[k].value;
    }
    return frame.spectral.from_eigenbasis(m);
}

ComplexMatrix gram_closed_form(const QuotientFrame& frame) {
    const int r = frame.r;
    const int d = frame.d;
    const RealVector p = frame.spectral.clamped();
    ComplexMatrix s = ComplexMatrix::Zero(frame.dt, frame.dt);
    for (int i = 0; i < r; ++i) s(i, i) = p(i);

    const int npair = r * (r - 1) / 2;
    for (int j = 1; j < r; ++j) {
        for (int i = 0; i < j; ++i) {
            const int a = r + j * (j - 1) / 2 + i;
            const int b = a + npair;
            const double plus = 0.5 * (p(i) + p(j));
            const double minus = 0.5 * (p(i) - p(j));
            s(a, a) = plus;
            s(b, b) = plus;
            s(a, b) = -kI * minus;
            s(b, a) = kI * minus;
        }
    }

    const int nsk = r * (d - r);
    const int base = r + 2 * npair;
    for (int k = r; k < d; ++k) {
        for (int i = 0; i < r; ++i) {
            const int a = base + r * (k - r) + i;
            const int b = a + nsk;
            const double half = 0.5 * p(i);
            s(a, a) = half;
            s(b, b) = half;
            s(a, b) = -kI * half;
            s(b, a) = kI * half;
        }
    }
    return s;
}

ComplexMatrix gram_direct(const QuotientFrame& frame, const ComplexMatrix& rho) {
    const ComplexMatrix rho_e = frame.spectral.to_eigenbasis(rho);
    ComplexMatrix s(frame.dt, frame.dt);
    // Tr[l_a l_b rho] = sum l_a(x,y) l_b(y,z) rho(z,x)
    for (int a = 0; a < frame.dt; ++a) {
        const FrameElement& ea = frame.elements[a];
        for (int b = 0; b < frame.dt; ++b) {
            const FrameElement& eb = frame.elements[b];
            Complex t = 0.0;
            for (int u = 0; u < ea.count; ++u)
                for (int v = 0; v < eb.count; ++v)
                    if (ea.entries[u].col == eb.entries[v].row)
                        t += ea.entries[u].value * eb.entries[v].value * rho_e(eb.entries[v].col, ea.entries[u].row);
            s(a, b) = t;
        }
    }
    return s;
}

ComplexMatrix build_gram(const QuotientFrame& frame, const ComplexMatrix& rho, double tol) {
    ComplexMatrix closed = gram_closed_form(frame);
    const double mismatch = max_abs(closed - gram_direct(frame, rho));
    if (mismatch > tol) {
        std::ostringstream os;
        os << "closed-form Gram blocks differ from direct evaluation by " << mismatch;
        throw Error(ErrorKind::BlockMismatch, os.str());
    }
    return closed;
}

ComplexMatrix factor_gram(const ComplexMatrix& s, std::optional<double> tol) {
    if (s.rows() != s.cols()) throw Error(ErrorKind::DimensionMismatch, "Gram matrix must be square");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(s));
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigSolverFailure, "Gram eigendecomposition failed");
    const RealVector& mu = es.eigenvalues();
    const double lmax = mu.size() ? mu.maxCoeff() : 0.0;
    if (mu.size() && mu.minCoeff() < -1e-8) {
        std::ostringstream os;
        os << "Gram matrix has eigenvalue " << mu.minCoeff();
        throw Error(ErrorKind::NotPsd, os.str());
    }
    const double cut = tol.value_or(1e-12 * std::max(lmax, 0.0));
    std::vector<int> keep;
    for (Eigen::Index k = mu.size() - 1; k >= 0; --k)
        if (mu(k) > cut) keep.push_back(static_cast<int>(k));
    ComplexMatrix r(static_cast<Eigen::Index>(keep.size()), s.cols());
    for (std::size_t row = 0; row < keep.size(); ++row)
        r.row(row) = std::sqrt(mu(keep[row])) * es.eigenvectors().col(keep[row]).adjoint();
    return r;
}

}  // namespace qbounds
