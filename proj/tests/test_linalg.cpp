#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "qbounds/errors.hpp"
#include "qbounds/linalg.hpp"
#include "qbounds/serialize.hpp"
#include "qbounds/spectral.hpp"

using namespace qbounds;

namespace {

ComplexMatrix pauli_y() {
    ComplexMatrix y(2, 2);
    y << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
    return y;
}

}  // namespace

TEST(Linalg, TraceNormOfAntisymmetricBlock) {
    RealMatrix a(2, 2);
    a << 0.0, 1.5, -1.5, 0.0;
    EXPECT_NEAR(trace_norm(a), 3.0, 1e-14);
}

TEST(Linalg, SymmetricSqrtSquaresBack) {
    RealMatrix b(3, 3);
    b << 2, 1, 0, 1, 3, 1, 0, 1, 4;
    const RealMatrix s = symmetric_sqrt(b);
    EXPECT_LT(max_abs(s * s - b), 1e-13);
    EXPECT_LT(max_abs(s - s.transpose()), 1e-14);
}

TEST(Linalg, UnitaryExpOfPauliY) {
    const double t = 0.37;
    const ComplexMatrix u = unitary_exp(t * pauli_y());
    ComplexMatrix expect(2, 2);
    // exp(-i t Y) = cos t - i sin t Y
    expect << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    EXPECT_LT(max_abs(u - expect), 1e-14);
}

TEST(Linalg, RealEmbeddingDoublesSpectrum) {
    const ComplexMatrix h = pauli_y() + 0.5 * ComplexMatrix::Identity(2, 2);
    const RealMatrix e = real_embedding(h);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(e);
    EXPECT_NEAR(es.eigenvalues()(0), -0.5, 1e-14);
    EXPECT_NEAR(es.eigenvalues()(1), -0.5, 1e-14);
    EXPECT_NEAR(es.eigenvalues()(2), 1.5, 1e-14);
    EXPECT_NEAR(es.eigenvalues()(3), 1.5, 1e-14);
}

TEST(Linalg, KronAndTraceProduct) {
    const ComplexMatrix y = pauli_y();
    const ComplexMatrix yy = kron(y, y);
    EXPECT_EQ(yy.rows(), 4);
    EXPECT_NEAR(std::abs(trace_product(yy, yy) - Complex(4.0, 0.0)), 0.0, 1e-14);
    EXPECT_TRUE(is_hermitian(yy));
    EXPECT_FALSE(is_hermitian(ComplexMatrix(yy + Complex(0, 1) * ComplexMatrix::Identity(4, 4))));
}

TEST(Serialize, SeventeenDigitsRoundTrip) {
    const double x = 0.1 + 0.2;
    std::ostringstream os;
    write_json_number(os, x);
    EXPECT_EQ(std::stod(os.str()), x);
    std::ostringstream nan;
    write_json_number(nan, std::numeric_limits<double>::quiet_NaN());
    EXPECT_EQ(nan.str(), "null");
}

TEST(Spectral, RankAndReconstruction) {
    ComplexMatrix v(3, 2);
    v << 1, 0, 0, Complex(0, 1), 0, 0;
    const ComplexMatrix rho = v * RealVector(Eigen::Vector2d(0.7, 0.3)).cast<Complex>().asDiagonal() * v.adjoint();
    const SpectralData sp = eigendecompose(rho);
    EXPECT_EQ(sp.rank, 2);
    EXPECT_NEAR(sp.values(0), 0.7, 1e-14);
    EXPECT_LT(max_abs(sp.reconstruct() - rho), 1e-14);
    EXPECT_EQ(with_forced_rank(sp, 3).rank, 3);
}

TEST(Spectral, RejectsNonHermitian) {
    ComplexMatrix a = ComplexMatrix::Identity(2, 2) * 0.5;
    a(0, 1) = 0.3;
    try {
        eigendecompose(a);
        FAIL() << "expected NotHermitian";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
    }
}
