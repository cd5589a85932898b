#include "qbounds/interferometer.hpp"

#include <cmath>

#include "qbounds/errors.hpp"

namespace qbounds {

namespace {

double binomial(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

void check_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw Error(ErrorKind::BoundaryTransmissivity, "transmissivity must lie strictly inside (0, 1)");
}

}  // namespace

ProbeSpec make_probe(ComplexVector c) {
    if (c.size() < 2) throw Error(ErrorKind::InvalidArgument, "a probe needs at least one photon");
    const double norm = c.squaredNorm();
    if (std::abs(norm - 1.0) > 1e-10) throw Error(ErrorKind::InvariantViolation, "probe amplitudes are not normalized");
    ProbeSpec p;
    p.N = static_cast<int>(c.size()) - 1;
    p.c = std::move(c);
    return p;
}

ProbeSpec holland_burnett(int N) {
    if (N < 2 || N % 2 != 0)
        throw Error(ErrorKind::OddPhotonNumber, "Holland-Burnett states need an even photon number N >= 2");
    ComplexVector c = ComplexVector::Zero(N + 1);
    const int h = N / 2;
    for (int k = 0; k <= h; ++k) {
        const double lg = 0.5 * (std::lgamma(2 * k + 1.0) + std::lgamma(N - 2 * k + 1.0)) - h * std::log(2.0) -
                          std::lgamma(k + 1.0) - std::lgamma(h - k + 1.0);
        c(2 * k) = std::exp(lg);
    }
    c /= c.norm();  // absorbs rounding in the factorial ratios
    ProbeSpec p;
    p.N = N;
    p.c = c;
    return p;
}

double loss_probability(int k, int l, double eta) {
    if (l < 0 || l > k) return 0.0;
    return binomial(k, l) * std::pow(eta, k - l) * std::pow(1.0 - eta, l);
}

int interferometer_index(int N, int l, int k) {
    // Block l holds N - l + 1 states and starts after sum_{l' < l} (N - l' + 1).
    const int start = l * (N + 1) - l * (l - 1) / 2;
    return start + (k - l);
}

QuantumModel evolve(const ProbeSpec& probe, double phi, double eta) {
    check_eta(eta);
    const int N = probe.N;
    const int d = interferometer_dim(N);
    ComplexMatrix rho = ComplexMatrix::Zero(d, d);
    ComplexMatrix dphi = ComplexMatrix::Zero(d, d);
    ComplexMatrix deta = ComplexMatrix::Zero(d, d);
    for (int l = 0; l <= N; ++l) {
        const int len = N - l + 1;
        ComplexVector psi(len), psi_phi(len), psi_eta(len);
        for (int k = l; k <= N; ++k) {
            const double sb = std::sqrt(loss_probability(k, l, eta));
            const Complex amp = probe.c(k) * std::polar(1.0, k * phi) * sb;
            psi(k - l) = amp;
            psi_phi(k - l) = Complex(0.0, k) * amp;
            psi_eta(k - l) = amp * ((k - l) / (2.0 * eta) - l / (2.0 * (1.0 - eta)));
        }
        const int s = interferometer_index(N, l, l);
        rho.block(s, s, len, len) = psi * psi.adjoint();
        dphi.block(s, s, len, len) = psi_phi * psi.adjoint() + psi * psi_phi.adjoint();
        deta.block(s, s, len, len) = psi_eta * psi.adjoint() + psi * psi_eta.adjoint();
    }
    RealVector theta(2);
    theta << phi, eta;
    return make_model(theta, hermitian_part(rho), {hermitian_part(dphi), hermitian_part(deta)});
}

RealMatrix analytic_qfim(const ProbeSpec& probe, double eta) {
    check_eta(eta);
    const int N = probe.N;
    double k2 = 0.0, mean = 0.0, between = 0.0;
    for (int k = 0; k <= N; ++k) {
        const double w = std::norm(probe.c(k));
        k2 += k * k * w;
        mean += k * w;
    }
    for (int l = 0; l <= N; ++l) {
        double pl = 0.0, kl = 0.0;
        for (int k = l; k <= N; ++k) {
            const double wb = std::norm(probe.c(k)) * loss_probability(k, l, eta);
            pl += wb;
            kl += k * wb;
        }
        if (pl > 0.0) between += kl * kl / pl;
    }
    RealMatrix j = RealMatrix::Zero(2, 2);
    j(0, 0) = 4.0 * (k2 - between);
    j(1, 1) = mean / (eta * (1.0 - eta));
    return j;
}

RealMatrix analytic_phase_measurement_fim(const ProbeSpec& probe, double eta) {
    RealMatrix j = analytic_qfim(probe, eta);
    j(1, 1) -= j(0, 0) / (4.0 * eta * eta);
    return j;
}

std::string_view to_string(OracleRegion r) {
    return r == OracleRegion::SldMeasurement ? "sld-measurement" : "rotated";
}

OnePhotonOracle onephoton_hcrb_oracle(double c1sq, double eta) {
    if (!(c1sq > 0.0 && c1sq < 1.0)) throw Error(ErrorKind::InvalidArgument, "|c_1|^2 must lie in (0, 1)");
    check_eta(eta);
    const double c0sq = 1.0 - c1sq;
    const double boundary = 0.5 * (1.0 - c1sq / c0sq);
    if (c1sq >= 0.5 || eta >= boundary) {
        const double v = (c1sq * (eta - 1.0) + 1.0) * (4.0 * c0sq * (1.0 - eta) * eta + 1.0) / (4.0 * c1sq * c0sq * eta);
        return {v, OracleRegion::SldMeasurement};
    }
    return {(1.0 + 3.0 * eta - 4.0 * eta * eta * eta) / (4.0 * c1sq * eta), OracleRegion::Rotated};
}

double onephoton_max_reldiff(double eta) {
    if (!(eta > 0.0 && eta < 0.5)) return 0.0;
    return eta * (1.0 - 2.0 * eta) * (1.0 - 2.0 * eta) / (1.0 + 4.0 * eta - 4.0 * eta * eta);
}

}  // namespace qbounds
