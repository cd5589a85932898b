#pragma once

#include <string_view>

#include "qbounds/linalg.hpp"
#include "qbounds/model.hpp"

namespace qbounds {

/// Fixed-photon-number probe sum_k c_k |k, N-k>; the phase and the loss act
/// on the mode holding k photons.
struct ProbeSpec {
    int N = 0;
    ComplexVector c;
};

ProbeSpec make_probe(ComplexVector c);
/// Throws OddPhotonNumber for odd or N < 2.
ProbeSpec holland_burnett(int N);

/// C(k, l) eta^(k-l) (1-eta)^l: probability of losing l of k photons.
double loss_probability(int k, int l, double eta);

inline int interferometer_dim(int N) { return (N + 1) * (N + 2) / 2; }
/// Basis index of |k - l, N - k> (l photons lost, k in the lossy arm before loss).
/// Blocks are ordered by l = 0..N, and by k = l..N within a block.
int interferometer_index(int N, int l, int k);

/// Lossy phase model at theta = (phi, eta), identity weight. Throws
/// BoundaryTransmissivity unless 0 < eta < 1.
QuantumModel evolve(const ProbeSpec& probe, double phi, double eta);

/// Closed-form diagonal QFIM.
RealMatrix analytic_qfim(const ProbeSpec& probe, double eta);
/// Classical Fisher information of the phase-SLD eigenbasis measurement:
/// diag(J_phiphi, J_etaeta - J_phiphi / (4 eta^2)).
RealMatrix analytic_phase_measurement_fim(const ProbeSpec& probe, double eta);

enum class OracleRegion { SldMeasurement, Rotated };
std::string_view to_string(OracleRegion r);

struct OnePhotonOracle {
    double value;
    OracleRegion region;
};

/// Closed-form HCRB for N = 1 with W = I, as a function of |c_1|^2 and eta.
OnePhotonOracle onephoton_hcrb_oracle(double c1sq, double eta);
/// Largest relative gap between the HCRB and the phase-measurement bound at
/// N = 1 over all probes, for eta < 1/2.
double onephoton_max_reldiff(double eta);

}  // namespace qbounds
