#include <gtest/gtest.h>

#include "qbounds/errors.hpp"
#include "qbounds/hcrb.hpp"
#include "qbounds/info_geometry.hpp"
#include "qbounds/interferometer.hpp"
#include "qbounds/linalg.hpp"
#include "qbounds/magnetometry.hpp"
#include "qbounds/selftest.hpp"

using namespace qbounds;

TEST(Hcrb, FrozenRandomModels) {
    EXPECT_NEAR(solve_hcrb(random_model(3, 2, 2, 1001, true)).value, 2.81954506210147, 3e-7);
    EXPECT_NEAR(solve_hcrb(random_model(2, 2, 1, 7, false)).value, 2.6593318108833, 3e-7);
    EXPECT_NEAR(solve_hcrb(random_model(4, 3, 2, 11, true)).value, 4.21520132609987, 4e-7);
}

TEST(Hcrb, AgreesWithBruteForce) {
    // The brute-force minimizer works on explicit Hermitian matrices without the
    // quotient or the conic solver.
    for (std::uint64_t seed : {7u, 12u}) {
        const QuantumModel m = random_model(2, 2, 1, seed);
        const double c = solve_hcrb(m).value;
        const double b = brute_force_holevo(m);
        EXPECT_NEAR(c, b, 1e-6 * b) << "seed " << seed;
    }
}

TEST(Hcrb, OptimumIsConsistent) {
    const QuantumModel m = random_model(3, 3, 2, 77, true);
    const HcrbResult r = solve_hcrb(m);
    ASSERT_EQ(r.status, ConicStatus::Optimal);
    EXPECT_TRUE(r.certificates.all_pass());
    // The optimal X is locally unbiased and h(X) reproduces the value.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(trace_product(r.X[i], m.drho[j]).real(), i == j ? 1.0 : 0.0, 1e-7);
    EXPECT_NEAR(r.h_at_opt, r.value, 1e-6 * r.value);
    EXPECT_NEAR(holevo_function(r.X, m, m.weight), r.h_at_opt, 1e-9 * r.value);
    EXPECT_NEAR(holevo_value(holevo_z(r.X, m.rho), m.weight), r.h_at_opt, 1e-9 * r.value);
}

TEST(Hcrb, SandwichedByOtherBounds) {
    for (std::uint64_t seed = 300; seed < 306; ++seed) {
        const QuantumModel m = random_model(3, 2, 1 + seed % 3, seed);
        const double c_h = solve_hcrb(m).value;
        const double c_s = sld_bound(compute_slds(m), m.weight);
        EXPECT_GE(c_h, c_s - 1e-7 * c_s);
        EXPECT_LE(c_h, 2.0 * c_s + 1e-7 * c_s);
        const double c_r = rld_limit_bound(compute_rlds(m), m.weight);
        EXPECT_GE(c_h, c_r - 1e-7 * c_r);
    }
}

TEST(Hcrb, FullSpaceMatchesQuotient) {
    HcrbOptions full;
    full.full_space = true;
    for (int rank : {1, 2}) {
        const QuantumModel m = random_model(4, 2, rank, 500 + rank);
        const HcrbResult q = solve_hcrb(m);
        const HcrbResult f = solve_hcrb(m, full);
        EXPECT_EQ(f.dt, 16);
        EXPECT_LT(q.dt, f.dt);
        EXPECT_NEAR(f.value, q.value, 1e-6 * q.value);
    }
}

TEST(Hcrb, FeasibleStartIsStrictlyFeasible) {
    const QuantumModel m = random_model(4, 3, 2, 61);
    const HcrbProgram prog = assemble_hcrb(m);
    const FeasibleStart s = feasible_start(prog, m);
    EXPECT_GT(s.margin, 0.0);
    EXPECT_GT(min_eigenvalue(prog.lmi(prog.pack(s.V, s.Xvec))), 0.0);
    EXPECT_GE(s.V.trace(), solve_hcrb(prog).value);
}

TEST(Hcrb, PackUnpackRoundTrip) {
    const HcrbProgram prog = assemble_hcrb(random_model(3, 3, 2, 4));
    RealMatrix v = RealMatrix::Random(3, 3);
    v = v + v.transpose().eval();
    const RealMatrix x = RealMatrix::Random(prog.dt, 3);
    const RealVector packed = prog.pack(v, x);
    EXPECT_EQ(packed.size(), prog.n_v() + prog.dt * 3);
    EXPECT_EQ(prog.unpack_v(packed), v);
    EXPECT_EQ(prog.unpack_x(packed), x);
}

TEST(Hcrb, WeightScalesLinearly) {
    const QuantumModel m = random_model(3, 2, 2, 90, true);
    const double a = solve_hcrb(m).value;
    const QuantumModel s = make_model(m.theta, m.rho, m.drho, 3.7 * m.weight);
    EXPECT_NEAR(solve_hcrb(s).value, 3.7 * a, 1e-7 * a);
}

TEST(Hcrb, DegenerateDerivativesAreSingular) {
    const QuantumModel base = random_model(3, 2, 2, 19);
    const QuantumModel m = make_model(base.theta, base.rho, {base.drho[0], base.drho[0]});
    try {
        solve_hcrb(m);
        FAIL() << "expected SingularModel";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularModel);
    }
}

TEST(Hcrb, PureQubitAttainsTwiceSld) {
    // For a pure qubit with two parameters the D term doubles the SLD bound
    // with identity weight when the tangent directions are orthogonal.
    ComplexVector psi(2);
    psi << 1.0, 0.0;
    const ComplexMatrix rho = psi * psi.adjoint();
    const QuantumModel m = make_model(RealVector::Zero(2), rho, {0.5 * pauli(0), 0.5 * pauli(1)});
    const double c_s = sld_bound(compute_slds(m), m.weight);
    EXPECT_NEAR(c_s, 2.0, 1e-12);
    EXPECT_NEAR(solve_hcrb(m).value, 4.0, 1e-7);
}
