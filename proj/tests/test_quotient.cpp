#include <gtest/gtest.h>

#include "qbounds/errors.hpp"
#include "qbounds/linalg.hpp"
#include "qbounds/quotient.hpp"
#include "qbounds/selftest.hpp"
#include "qbounds/spectral.hpp"

using namespace qbounds;

namespace {

QuotientFrame frame_for(int d, int rank, std::uint64_t seed) {
    const QuantumModel m = random_model(d, 2, rank, seed);
    return build_frame(eigendecompose(m.rho));
}

}  // namespace

TEST(Quotient, DimensionCount) {
    for (int d = 2; d <= 5; ++d)
        for (int r = 1; r <= d; ++r) {
            const QuotientFrame f = frame_for(d, r, 100 + d * 10 + r);
            EXPECT_EQ(f.r, r);
            EXPECT_EQ(f.dt, 2 * d * r - r * r);
            EXPECT_EQ(static_cast<int>(f.elements.size()), f.dt);
        }
}

TEST(Quotient, BasisIsOrthonormalAndHermitian) {
    const QuotientFrame f = frame_for(4, 2, 5);
    for (int i = 0; i < f.dt; ++i) {
        const ComplexMatrix bi = f.basis(i);
        EXPECT_TRUE(is_hermitian(bi));
        for (int j = 0; j < f.dt; ++j) {
            const Complex t = trace_product(bi, f.basis(j));
            EXPECT_NEAR(t.real(), i == j ? 1.0 : 0.0, 1e-13);
            EXPECT_NEAR(t.imag(), 0.0, 1e-13);
        }
    }
}

TEST(Quotient, VectorizeRoundTrip) {
    const QuantumModel m = random_model(4, 2, 3, 17);
    const QuotientFrame f = build_frame(eigendecompose(m.rho));
    // Derivatives have no kernel-kernel block, so the round trip is exact.
    for (const auto& dr : m.drho) {
        const RealVector x = vectorize(dr, f);
        EXPECT_LT(max_abs(devectorize(x, f) - dr), 1e-13);
        EXPECT_NEAR(trace_product(dr, dr).real(), x.squaredNorm(), 1e-13);
    }
    const ComplexMatrix kernel_only = f.spectral.vectors.col(3) * f.spectral.vectors.col(3).adjoint();
    EXPECT_LT(vectorize(kernel_only, f).norm(), 1e-14);
}

TEST(Quotient, GramClosedFormMatchesDirect) {
    for (int r = 1; r <= 3; ++r) {
        const QuantumModel m = random_model(3, 2, r, 40 + r);
        const QuotientFrame f = build_frame(eigendecompose(m.rho));
        const ComplexMatrix s = build_gram(f, m.rho);
        EXPECT_LT(max_abs(s - gram_direct(f, m.rho)), 1e-12);
        EXPECT_LT(max_abs(s - s.adjoint()), 1e-15);
        EXPECT_GT(min_eigenvalue(s), -1e-14);
    }
}

TEST(Quotient, GramDetectsForeignState) {
    const QuantumModel m = random_model(3, 2, 2, 71);
    const QuotientFrame f = build_frame(eigendecompose(m.rho));
    const QuantumModel other = random_model(3, 2, 2, 72);
    try {
        build_gram(f, other.rho);
        FAIL() << "expected BlockMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BlockMismatch);
    }
}

TEST(Quotient, FactorReproducesGram) {
    const QuantumModel m = random_model(4, 2, 2, 9);
    const QuotientFrame f = build_frame(eigendecompose(m.rho));
    const ComplexMatrix s = build_gram(f, m.rho);
    const ComplexMatrix r = factor_gram(s);
    EXPECT_EQ(r.cols(), f.dt);
    EXPECT_LT(max_abs(r.adjoint() * r - s), 1e-13);
}

TEST(Quotient, FactorRejectsIndefinite) {
    ComplexMatrix s = ComplexMatrix::Identity(2, 2);
    s(1, 1) = -0.5;
    try {
        factor_gram(s);
        FAIL() << "expected NotPsd";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPsd);
    }
}
