#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "qbounds/errors.hpp"
#include "qbounds/hcrb.hpp"
#include "qbounds/info_geometry.hpp"
#include "qbounds/interferometer.hpp"
#include "qbounds/linalg.hpp"

using namespace qbounds;

namespace {

ProbeSpec onephoton(double c1sq) {
    ComplexVector c(2);
    c << std::sqrt(1.0 - c1sq), std::sqrt(c1sq);
    return make_probe(c);
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

TEST(Interferometer, HollandBurnettProbe) {
    for (int n : {2, 4, 6}) {
        const ProbeSpec p = holland_burnett(n);
        EXPECT_EQ(p.N, n);
        EXPECT_EQ(p.c.size(), n + 1);
        EXPECT_NEAR(p.c.squaredNorm(), 1.0, 1e-14);
        // Symmetric in the two modes, with odd photon numbers absent.
        for (int k = 0; k <= n; ++k) {
            EXPECT_NEAR(std::abs(p.c(k)), std::abs(p.c(n - k)), 1e-14);
            if (k % 2) EXPECT_LT(std::abs(p.c(k)), 1e-14);
        }
    }
    // N = 2: (|2,0> - |0,2>) / sqrt(2) up to phase
    EXPECT_NEAR(std::norm(holland_burnett(2).c(0)), 0.5, 1e-14);
    EXPECT_EQ(kind_of([] { holland_burnett(3); }), ErrorKind::OddPhotonNumber);
    EXPECT_EQ(kind_of([] { holland_burnett(0); }), ErrorKind::OddPhotonNumber);
}

TEST(Interferometer, LossProbabilitiesAndIndexing) {
    for (int k = 0; k <= 5; ++k) {
        double total = 0.0;
        for (int l = 0; l <= k; ++l) total += loss_probability(k, l, 0.37);
        EXPECT_NEAR(total, 1.0, 1e-14);
    }
    EXPECT_NEAR(loss_probability(4, 1, 0.7), 4 * 0.343 * 0.3, 1e-15);
    const int n = 4;
    std::set<int> seen;
    for (int l = 0; l <= n; ++l)
        for (int k = l; k <= n; ++k) seen.insert(interferometer_index(n, l, k));
    EXPECT_EQ(static_cast<int>(seen.size()), interferometer_dim(n));
    EXPECT_EQ(*seen.begin(), 0);
    EXPECT_EQ(*seen.rbegin(), interferometer_dim(n) - 1);
    EXPECT_EQ(interferometer_index(n, 0, 0), 0);
    EXPECT_EQ(interferometer_index(n, 1, 1), n + 1);
}

TEST(Interferometer, QfimMatchesClosedForm) {
    for (double eta : {0.2, 0.55, 0.9}) {
        for (const ProbeSpec& p : {holland_burnett(2), holland_burnett(4), onephoton(0.3)}) {
            const QuantumModel m = evolve(p, 0.4, eta);
            const RealMatrix j = compute_slds(m).J;
            EXPECT_LT(max_abs(j - analytic_qfim(p, eta)), 1e-9 * j.norm()) << "N " << p.N << " eta " << eta;
        }
    }
}

TEST(Interferometer, PhaseMeasurementFim) {
    for (double eta : {0.3, 0.8}) {
        const ProbeSpec p = holland_burnett(4);
        const QuantumModel m = evolve(p, 0.0, eta);
        const SldSet s = compute_slds(m);
        const RealMatrix f = classical_fim(m, sld_eigenbasis_povm(s, 0, m.rho));
        EXPECT_LT(max_abs(f - analytic_phase_measurement_fim(p, eta)), 1e-9 * f.norm()) << "eta " << eta;
    }
}

TEST(Interferometer, FrozenHollandBurnettValues) {
    EXPECT_NEAR(solve_hcrb(evolve(holland_burnett(2), 0.0, 0.7)).value, 0.672531947194419, 1e-7);
    EXPECT_NEAR(solve_hcrb(evolve(holland_burnett(4), 0.0, 0.5)).value, 0.504216902646894, 1e-7);
    const HcrbResult r = solve_hcrb(evolve(holland_burnett(2), 0.0, 0.7));
    EXPECT_EQ(r.dt, 27);
    EXPECT_EQ(r.rt, 18);
}

TEST(Interferometer, OnePhotonOracle) {
    const OnePhotonOracle a = onephoton_hcrb_oracle(0.3, 0.4);
    EXPECT_EQ(a.region, OracleRegion::SldMeasurement);
    EXPECT_NEAR(a.value, 4.08047619047619, 1e-13);
    EXPECT_NEAR(solve_hcrb(evolve(onephoton(0.3), 0.0, 0.4)).value, a.value, 1e-7 * a.value);

    const OnePhotonOracle rot = onephoton_hcrb_oracle(0.3, 0.2);
    EXPECT_EQ(rot.region, OracleRegion::Rotated);
    EXPECT_NEAR(solve_hcrb(evolve(onephoton(0.3), 0.0, 0.2)).value, rot.value, 1e-7 * rot.value);

    const OnePhotonOracle b = onephoton_hcrb_oracle(0.6, 0.5);
    EXPECT_EQ(b.region, OracleRegion::SldMeasurement);
    EXPECT_NEAR(solve_hcrb(evolve(onephoton(0.6), 1.1, 0.5)).value, b.value, 1e-7 * b.value);

    // The two closed forms meet on the region boundary.
    const double c1sq = 0.2, edge = 0.5 * (1.0 - c1sq / (1.0 - c1sq));
    const double below = onephoton_hcrb_oracle(c1sq, edge - 1e-9).value;
    const double above = onephoton_hcrb_oracle(c1sq, edge + 1e-9).value;
    EXPECT_NEAR(below, above, 1e-7 * above);

    EXPECT_EQ(kind_of([] { onephoton_hcrb_oracle(1.0, 0.5); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { onephoton_hcrb_oracle(0.5, 1.0); }), ErrorKind::BoundaryTransmissivity);
}

TEST(Interferometer, MaxRelativeGap) {
    EXPECT_EQ(onephoton_max_reldiff(0.5), 0.0);
    EXPECT_EQ(onephoton_max_reldiff(0.8), 0.0);
    double peak = 0.0;
    for (double eta = 0.001; eta < 0.5; eta += 0.001) peak = std::max(peak, onephoton_max_reldiff(eta));
    EXPECT_NEAR(peak, 0.049, 5e-4);
}

TEST(Interferometer, BoundaryAndProbeErrors) {
    EXPECT_EQ(kind_of([] { evolve(holland_burnett(2), 0.0, 0.0); }), ErrorKind::BoundaryTransmissivity);
    EXPECT_EQ(kind_of([] { evolve(holland_burnett(2), 0.0, 1.0); }), ErrorKind::BoundaryTransmissivity);
    ComplexVector c(2);
    c << 1.0, 1.0;
    EXPECT_EQ(kind_of([&] { make_probe(c); }), ErrorKind::InvariantViolation);
}
