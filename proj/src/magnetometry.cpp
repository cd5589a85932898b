#include "qbounds/magnetometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qbounds/errors.hpp"

namespace qbounds {

namespace {

void check_spec(int M, double gamma) {
    if (M < 1 || M > 10) throw Error(ErrorKind::InvalidArgument, "qubit count must lie in [1, 10]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorKind::InvalidArgument, "gamma must lie in [0, 1]");
}

ComplexMatrix embed_single(const ComplexMatrix& op, int M, int j) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < M; ++q) out = kron(out, q == j ? op : ComplexMatrix(ComplexMatrix::Identity(2, 2)));
    return out;
}

}  // namespace

ComplexMatrix pauli(int k) {
    ComplexMatrix s(2, 2);
    const Complex i(0.0, 1.0);
    switch (k) {
        case 0: s << 0, 1, 1, 0; break;
        case 1: s << 0, -i, i, 0; break;
        case 2: s << 1, 0, 0, -1; break;
        default: throw Error(ErrorKind::InvalidArgument, "Pauli index must be 0, 1 or 2");
    }
    return s;
}

ComplexMatrix collective_pauli(int M, int k) {
    const int d = 1 << M;
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < M; ++j) s += embed_single(pauli(k), M, j);
    return s;
}

ComplexVector ghz3d_state(int M) {
    if (M < 2) throw Error(ErrorKind::InvalidArgument, "3D-GHZ states need M >= 2");
    const double h = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    const std::array<ComplexVector, 6> single = {
        ComplexVector((ComplexVector(2) << h, h).finished()),  ComplexVector((ComplexVector(2) << h, -h).finished()),
        ComplexVector((ComplexVector(2) << h, i * h).finished()), ComplexVector((ComplexVector(2) << h, -i * h).finished()),
        ComplexVector((ComplexVector(2) << 1, 0).finished()),  ComplexVector((ComplexVector(2) << 0, 1).finished())};
    const int d = 1 << M;
    ComplexVector psi = ComplexVector::Zero(d);
    for (const auto& v : single) {
        ComplexVector t = ComplexVector::Ones(1);
        for (int q = 0; q < M; ++q) t = kron(t, v);
        psi += t;
    }
    return psi / psi.norm();
}

ComplexMatrix dephase(const ComplexMatrix& rho, int M, double gamma) {
    check_spec(M, gamma);
    ComplexMatrix out = rho;
    for (Eigen::Index a = 0; a < rho.rows(); ++a)
        for (Eigen::Index b = 0; b < rho.cols(); ++b) {
            const int hd = std::popcount(static_cast<unsigned>(a ^ b));
            if (hd) out(a, b) *= std::pow(1.0 - gamma, hd);
        }
    return out;
}

ComplexMatrix dephase_kraus(const ComplexMatrix& rho, int M, double gamma) {
    check_spec(M, gamma);
    ComplexMatrix e0 = ComplexMatrix::Zero(2, 2), e1 = ComplexMatrix::Zero(2, 2);
    e0(0, 0) = 1.0;
    e0(1, 1) = 1.0 - gamma;
    e1(1, 1) = std::sqrt(gamma * (2.0 - gamma));
    ComplexMatrix out = rho;
    for (int j = 0; j < M; ++j) {
        const ComplexMatrix k0 = embed_single(e0, M, j), k1 = embed_single(e1, M, j);
        out = k0 * out * k0.adjoint() + k1 * out * k1.adjoint();
    }
    return out;
}

std::array<ComplexMatrix, 3> generators(int M, const std::array<double, 3>& phi) {
    std::array<ComplexMatrix, 3> s;
    for (int k = 0; k < 3; ++k) s[k] = collective_pauli(M, k);
    const ComplexMatrix h = phi[0] * s[0] + phi[1] * s[1] + phi[2] * s[2];
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
    const RealVector& e = es.eigenvalues();
    const ComplexMatrix& u = es.eigenvectors();
    const Eigen::Index d = h.rows();
    ComplexMatrix kernel(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            const double x = e(a) - e(b);
            // (e^{ix} - 1) / (ix), with its Taylor series near zero
            kernel(a, b) = std::abs(x) < 1e-6 ? Complex(1.0 - x * x / 6.0, x / 2.0)
                                              : (std::polar(1.0, x) - 1.0) / Complex(0.0, x);
        }
    std::array<ComplexMatrix, 3> a;
    for (int k = 0; k < 3; ++k) {
        const ComplexMatrix sk = u.adjoint() * s[k] * u;
        a[k] = hermitian_part(u * sk.cwiseProduct(kernel) * u.adjoint());
    }
    return a;
}

std::vector<ComplexMatrix> generator_derivatives(const MagnetometrySpec& spec, const ComplexVector& probe) {
    check_spec(spec.M, spec.gamma);
    const ComplexMatrix rho0 = probe * probe.adjoint();
    const ComplexMatrix h = spec.phi[0] * collective_pauli(spec.M, 0) + spec.phi[1] * collective_pauli(spec.M, 1) +
                            spec.phi[2] * collective_pauli(spec.M, 2);
    const ComplexMatrix u = unitary_exp(h);
    const auto a = generators(spec.M, spec.phi);
    std::vector<ComplexMatrix> out;
    const Complex i(0.0, 1.0);
    for (int k = 0; k < 3; ++k) {
        const ComplexMatrix comm = rho0 * a[k] - a[k] * rho0;
        out.push_back(hermitian_part(dephase(i * u * comm * u.adjoint(), spec.M, spec.gamma)));
    }
    return out;
}

QuantumModel encode_and_dephase(const MagnetometrySpec& spec, const ComplexVector& probe) {
    check_spec(spec.M, spec.gamma);
    if (probe.size() != (1 << spec.M)) throw Error(ErrorKind::DimensionMismatch, "probe must have 2^M amplitudes");
    const ComplexMatrix h = spec.phi[0] * collective_pauli(spec.M, 0) + spec.phi[1] * collective_pauli(spec.M, 1) +
                            spec.phi[2] * collective_pauli(spec.M, 2);
    const ComplexVector psi = unitary_exp(h) * probe;
    const ComplexMatrix rho = hermitian_part(dephase(psi * psi.adjoint(), spec.M, spec.gamma));
    RealVector theta(3);
    theta << spec.phi[0], spec.phi[1], spec.phi[2];
    return make_model(theta, rho, generator_derivatives(spec, probe));
}

QuantumModel encode_and_dephase(const MagnetometrySpec& spec) { return encode_and_dephase(spec, ghz3d_state(spec.M)); }

ComplexVector permute_qubits(const ComplexVector& state, const std::vector<int>& perm) {
    const int M = static_cast<int>(perm.size());
    if (state.size() != (1 << M)) throw Error(ErrorKind::DimensionMismatch, "permutation length does not match state");
    std::vector<int> check = perm;
    std::sort(check.begin(), check.end());
    for (int j = 0; j < M; ++j)
        if (check[j] != j) throw Error(ErrorKind::InvalidArgument, "not a permutation");
    ComplexVector out(state.size());
    // Qubit 0 is the most significant bit, matching kron ordering.
    for (int idx = 0; idx < (1 << M); ++idx) {
        int target = 0;
        for (int j = 0; j < M; ++j) {
            const int bit = (idx >> (M - 1 - j)) & 1;
            target |= bit << (M - 1 - perm[j]);
        }
        out(target) = state(idx);
    }
    return out;
}

}  // namespace qbounds
