#include <cmath>

#include <gtest/gtest.h>

#include "qbounds/errors.hpp"
#include "qbounds/hcrb.hpp"
#include "qbounds/info_geometry.hpp"
#include "qbounds/linalg.hpp"
#include "qbounds/magnetometry.hpp"
#include "qbounds/selftest.hpp"

using namespace qbounds;

namespace {

MagnetometrySpec spec(int m, double gamma) {
    MagnetometrySpec s;
    s.M = m;
    s.gamma = gamma;
    return s;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no exception";
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Magnetometry, PauliAlgebra) {
    const ComplexMatrix x = pauli(0), y = pauli(1), z = pauli(2);
    EXPECT_LT(max_abs(ComplexMatrix(x * y - y * x) - Complex(0, 2) * z), 1e-15);
    const ComplexMatrix jx = collective_pauli(3, 0), jy = collective_pauli(3, 1), jz = collective_pauli(3, 2);
    EXPECT_EQ(jx.rows(), 8);
    EXPECT_LT(max_abs(ComplexMatrix(jx * jy - jy * jx) - Complex(0, 2) * jz), 1e-14);
}

TEST(Magnetometry, GhzStateIsPermutationInvariant) {
    for (int m : {2, 3, 4}) {
        const ComplexVector g = ghz3d_state(m);
        EXPECT_NEAR(g.norm(), 1.0, 1e-14);
        std::vector<int> perm(m);
        for (int j = 0; j < m; ++j) perm[j] = (j + 1) % m;
        EXPECT_LT((permute_qubits(g, perm) - g).norm(), 1e-14);
    }
    EXPECT_EQ(kind_of([] { ghz3d_state(1); }), ErrorKind::InvalidArgument);
}

TEST(Magnetometry, PermuteMovesQubits) {
    ComplexVector s = ComplexVector::Zero(8);
    s(0b100) = 1.0;  // first qubit (most significant) excited
    const ComplexVector t = permute_qubits(s, {2, 0, 1});
    EXPECT_NEAR(std::abs(t(0b001)), 1.0, 1e-15);
    EXPECT_EQ(kind_of([&] { permute_qubits(s, {0, 0, 1}); }), ErrorKind::InvalidArgument);
}

TEST(Magnetometry, DephasingMatchesKrausForm) {
    const ComplexVector g = ghz3d_state(3);
    const ComplexMatrix rho = g * g.adjoint();
    for (double gamma : {0.0, 0.25, 0.8, 1.0}) {
        const ComplexMatrix a = dephase(rho, 3, gamma);
        EXPECT_LT(max_abs(a - dephase_kraus(rho, 3, gamma)), 1e-14) << "gamma " << gamma;
        EXPECT_NEAR(a.trace().real(), 1.0, 1e-14);
    }
    // Hamming distance 3 between |000> and |111>.
    EXPECT_NEAR(std::abs(dephase(rho, 3, 0.5)(0, 7)), std::abs(rho(0, 7)) * 0.125, 1e-15);
    EXPECT_EQ(kind_of([&] { dephase(rho, 3, 1.5); }), ErrorKind::InvalidArgument);
}

TEST(Magnetometry, DerivativesMatchFiniteDifferences) {
    MagnetometrySpec s = spec(2, 0.3);
    s.phi = {0.4, -0.7, 1.2};
    const ComplexVector probe = ghz3d_state(2);
    const QuantumModel m = encode_and_dephase(s, probe);
    const auto fd = finite_difference_derivatives(
        [&](const RealVector& th) {
            MagnetometrySpec t = s;
            t.phi = {th(0), th(1), th(2)};
            return encode_and_dephase(t, probe).rho;
        },
        m.theta);
    for (int k = 0; k < 3; ++k) EXPECT_LT(max_abs(fd[k] - m.drho[k]), 1e-8) << "k " << k;
}

TEST(Magnetometry, FrozenBounds) {
    const HcrbResult m2 = solve_hcrb(encode_and_dephase(spec(2, 0.0)));
    EXPECT_NEAR(m2.value, 2.01081658672668, 3e-7);
    EXPECT_EQ(m2.dt, 7);
    EXPECT_EQ(m2.rt, 4);
    const QuantumModel m2m = encode_and_dephase(spec(2, 0.0));
    EXPECT_NEAR(sld_bound(compute_slds(m2m), m2m.weight), 1.34641087846815, 1e-10);
    EXPECT_NEAR(rld_limit_bound(compute_rlds(m2m), m2m.weight), 1.64568414467011, 1e-9);
    EXPECT_NEAR(solve_hcrb(encode_and_dephase(spec(2, 0.5))).value, 3.03470445679828, 3e-7);
    EXPECT_NEAR(solve_hcrb(encode_and_dephase(spec(3, 0.3))).value, 0.881706370470684, 1e-7);
    EXPECT_NEAR(solve_hcrb(encode_and_dephase(spec(3, 0.7))).value, 3.03033224430933, 3e-7);
}

TEST(Magnetometry, FourQubitsAttainSld) {
    const QuantumModel m = encode_and_dephase(spec(4, 0.0));
    const double c_s = sld_bound(compute_slds(m), m.weight);
    EXPECT_NEAR(c_s, 0.33556701894129, 1e-10);
    EXPECT_NEAR(solve_hcrb(m).value, c_s, 1e-7 * c_s);
}

TEST(Magnetometry, RejectsBadSpecs) {
    EXPECT_EQ(kind_of([] { encode_and_dephase(spec(11, 0.0)); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { encode_and_dephase(spec(2, -0.1)); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { encode_and_dephase(spec(2, 0.0), ComplexVector::Ones(3)); }), ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([] { pauli(3); }), ErrorKind::InvalidArgument);
}
