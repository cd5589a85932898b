#include <gtest/gtest.h>

#include "qbounds/conic.hpp"
#include "qbounds/errors.hpp"
#include "qbounds/hcrb.hpp"
#include "qbounds/linalg.hpp"
#include "qbounds/selftest.hpp"

using namespace qbounds;

namespace {

RealMatrix unit(int m, int i, int j) {
    RealMatrix e = RealMatrix::Zero(m, m);
    e(i, j) = e(j, i) = 1.0;
    return e;
}

// minimize v1 + v2  s.t.  [[v1, 1], [1, v2]] >= 0; optimum 2 at (1, 1).
ConicProblem hyperbola() {
    RealMatrix g(2, 2);
    g << 0.0, -1.0, -1.0, 0.0;
    return ConicProblem::from_dense(RealVector::Ones(2), {-unit(2, 0, 0), -unit(2, 1, 1)}, g, RealMatrix(0, 2),
                                    RealVector(0));
}

ConicOptions with_backend(ConicBackend b) {
    ConicOptions o;
    o.backend = b;
    return o;
}

}  // namespace

class ConicBackends : public ::testing::TestWithParam<ConicBackend> {};

TEST_P(ConicBackends, Hyperbola) {
    const ConicProblem p = hyperbola();
    const ConicSolution s = solve_conic(p, with_backend(GetParam()));
    ASSERT_EQ(s.status, ConicStatus::Optimal) << s.message;
    EXPECT_NEAR(s.objective, 2.0, 1e-7);
    EXPECT_NEAR(s.v(0), 1.0, 1e-4);
    EXPECT_NEAR(s.v(1), 1.0, 1e-4);
    EXPECT_TRUE(validate_certificates(p, s).all_pass());
}

TEST_P(ConicBackends, EqualityConstraint) {
    // Same cone with v1 = 4 v2: optimum v2 = 1/2, objective 5/2.
    ConicProblem p = hyperbola();
    p.A = RealMatrix(1, 2);
    p.A << 1.0, -4.0;
    p.b = RealVector::Zero(1);
    const ConicSolution s = solve_conic(p, with_backend(GetParam()));
    ASSERT_EQ(s.status, ConicStatus::Optimal) << s.message;
    EXPECT_NEAR(s.objective, 2.5, 1e-7);
    EXPECT_NEAR(s.dual_objective, 2.5, 1e-7);
    EXPECT_NEAR(s.v(1), 0.5, 1e-5);
    EXPECT_TRUE(validate_certificates(p, s).all_pass());
}

TEST_P(ConicBackends, DetectsInfeasibility) {
    // [[v, 0], [0, -1]] >= 0 has no solution.
    RealMatrix g = RealMatrix::Zero(2, 2);
    g(1, 1) = 1.0;
    const ConicProblem p =
        ConicProblem::from_dense(RealVector::Ones(1), {-unit(2, 0, 0)}, g, RealMatrix(0, 1), RealVector(0));
    EXPECT_EQ(solve_conic(p, with_backend(GetParam())).status, ConicStatus::Infeasible);
}

TEST_P(ConicBackends, DetectsUnboundedness) {
    // minimize -v  s.t.  v >= 0
    const ConicProblem p = ConicProblem::from_dense(-RealVector::Ones(1), {-RealMatrix::Identity(1, 1)},
                                                    RealMatrix::Zero(1, 1), RealMatrix(0, 1), RealVector(0));
    EXPECT_EQ(solve_conic(p, with_backend(GetParam())).status, ConicStatus::Unbounded);
}

INSTANTIATE_TEST_SUITE_P(All, ConicBackends, ::testing::Values(ConicBackend::Factored, ConicBackend::DenseReference));

TEST(Conic, BackendsAgreeOnHolevoProgram) {
    const QuantumModel m = random_model(3, 2, 2, 1001, true);
    const HcrbProgram prog = assemble_hcrb(m);
    const ConicSolution a = solve_conic(prog.conic, with_backend(ConicBackend::Factored));
    const ConicSolution b = solve_conic(prog.conic, with_backend(ConicBackend::DenseReference));
    ASSERT_EQ(a.status, ConicStatus::Optimal);
    ASSERT_EQ(b.status, ConicStatus::Optimal);
    EXPECT_NEAR(a.objective, b.objective, 1e-7 * std::abs(a.objective));
    EXPECT_NEAR(a.objective, 2.81954506210147, 1e-7);
}

TEST(Conic, DictionaryApplyMatchesDense) {
    const QuantumModel m = random_model(3, 2, 1, 5);
    const HcrbProgram prog = assemble_hcrb(m);
    const ConicProblem& p = prog.conic;
    RealVector v = RealVector::LinSpaced(p.k, -1.0, 1.0);
    RealMatrix dense = RealMatrix::Zero(p.m, p.m);
    for (int i = 0; i < p.k; ++i) dense += v(i) * p.F(i);
    EXPECT_LT(max_abs(p.apply(v) - dense), 1e-13);
    const RealMatrix z = unit(p.m, 0, p.m - 1) + RealMatrix::Identity(p.m, p.m);
    const RealVector adj = p.adjoint(z);
    for (int i = 0; i < p.k; ++i) EXPECT_NEAR(adj(i), (p.F(i) * z).trace(), 1e-13);
}

TEST(Conic, JsonRoundTrip) {
    const QuantumModel m = random_model(2, 2, 1, 8);
    const ConicProblem p = assemble_hcrb(m).conic;
    const ConicProblem q = conic_from_json(conic_to_json(p));
    ASSERT_EQ(q.k, p.k);
    ASSERT_EQ(q.m, p.m);
    EXPECT_EQ(q.c, p.c);
    EXPECT_EQ(q.G, p.G);
    EXPECT_EQ(q.A, p.A);
    EXPECT_EQ(q.b, p.b);
    for (int i = 0; i < p.k; ++i) EXPECT_LT(max_abs(q.F(i) - p.F(i)), 1e-15);
    EXPECT_NEAR(solve_conic(q).objective, solve_conic(p).objective, 1e-9);
}

TEST(Conic, ValidationCatchesShapes) {
    ConicProblem p = hyperbola();
    p.G = RealMatrix::Zero(3, 3);
    try {
        p.validate();
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
    try {
        conic_from_json("[1, 2]");
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    }
}
