#include <cmath>

#include <gtest/gtest.h>

#include "qbounds/errors.hpp"
#include "qbounds/hcrb.hpp"
#include "qbounds/info_geometry.hpp"
#include "qbounds/linalg.hpp"
#include "qbounds/magnetometry.hpp"
#include "qbounds/measurement_search.hpp"
#include "qbounds/selftest.hpp"

using namespace qbounds;

TEST(MeasurementSearch, PauliProductBasis) {
    const auto b = pauli_product_basis(4);
    ASSERT_EQ(b.size(), 16u);
    EXPECT_LT(max_abs(b[0] - ComplexMatrix::Identity(4, 4)), 1e-15);
    EXPECT_LT(max_abs(b[1] - kron(ComplexMatrix::Identity(2, 2), pauli(0))), 1e-15);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            EXPECT_NEAR(std::abs(trace_product(b[i], b[j])), i == j ? 4.0 : 0.0, 1e-14);
    try {
        pauli_product_basis(3);
        FAIL() << "expected InvalidArgument";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}

TEST(MeasurementSearch, ProjectivePovmIsComplete) {
    const RealVector x = RealVector::LinSpaced(16, -1.3, 2.1);
    const Povm p = projective_povm(x, 4);
    ASSERT_EQ(p.elements.size(), 4u);
    EXPECT_NO_THROW(check_povm(p, 4));
    for (const auto& e : p.elements) {
        EXPECT_LT(max_abs(ComplexMatrix(e * e) - e), 1e-12);
        EXPECT_NEAR(e.trace().real(), 1.0, 1e-12);
    }
    // x = 0 makes V the identity; the degenerate eigenspace falls back to the
    // standard basis.
    const Povm z = projective_povm(RealVector::Zero(16), 4);
    for (int w = 0; w < 4; ++w) EXPECT_NEAR(z.elements[w](w, w).real(), 1.0, 1e-14);
}

TEST(MeasurementSearch, ProjectiveCrbMatchesClassicalFim) {
    const QuantumModel m = random_model(4, 2, 2, 88);
    const RealVector x = RealVector::LinSpaced(16, 0.2, 0.9);
    const RealMatrix f = classical_fim(m, projective_povm(x, 4));
    EXPECT_NEAR(projective_crb(m, x), (m.weight * f.inverse()).trace(), 1e-8 * projective_crb(m, x));
}

TEST(MeasurementSearch, SearchIsDeterministicAndAboveHolevo) {
    const QuantumModel m = random_model(4, 2, 1, 42);
    SearchOptions o;
    o.restarts = 4;
    o.seed = 123;
    o.jobs = 1;
    const SearchResult a = optimize_projective(m, o);
    o.jobs = 4;
    const SearchResult b = optimize_projective(m, o);
    EXPECT_EQ(search_result_json(a), search_result_json(b));
    EXPECT_EQ(a.restarts_used, 4);
    const double c_h = solve_hcrb(m).value;
    EXPECT_GE(a.best_value, c_h * (1.0 - 1e-7));
    EXPECT_EQ(search_trace_csv(a).rfind("restart,stream_seed,value,iterations\n", 0), 0u);
}

TEST(MeasurementSearch, RestartSeedsDiffer) {
    EXPECT_NE(restart_seed(1, 0), restart_seed(1, 1));
    EXPECT_NE(restart_seed(1, 0), restart_seed(2, 0));
    EXPECT_EQ(restart_seed(7, 3), restart_seed(7, 3));
}

TEST(MeasurementSearch, QubitTwoParameterModelsFail) {
    // Two outcomes carry information about one direction only.
    ComplexVector psi(2);
    psi << 1.0, 0.0;
    const QuantumModel m = make_model(RealVector::Zero(2), psi * psi.adjoint(), {0.5 * pauli(0), 0.5 * pauli(1)});
    SearchOptions o;
    o.restarts = 2;
    try {
        optimize_projective(m, o);
        FAIL() << "expected AllRestartsFailed";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AllRestartsFailed);
    }
    o.restarts = 0;
    try {
        optimize_projective(m, o);
        FAIL() << "expected InvalidArgument";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}
