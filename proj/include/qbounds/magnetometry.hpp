#pragma once

#include <array>
#include <vector>

#include "qbounds/linalg.hpp"
#include "qbounds/model.hpp"

namespace qbounds {

struct MagnetometrySpec {
    int M = 2;
    double gamma = 0.0;
    std::array<double, 3> phi{1.0, 1.0, 1.0};
};

/// Normalized sum of |v>^{(x)M} over the six Pauli eigenvectors
/// (|0> +- |1>)/sqrt2, (|0> +- i|1>)/sqrt2, |0>, |1>.
ComplexVector ghz3d_state(int M);

/// Single-qubit Pauli matrices x, y, z.
ComplexMatrix pauli(int k);
/// Collective spin sum_j sigma_k^(j) on M qubits.
ComplexMatrix collective_pauli(int M, int k);

/// Off-diagonal damping by (1 - gamma)^h(i, j), h the Hamming distance.
ComplexMatrix dephase(const ComplexMatrix& rho, int M, double gamma);
/// Same channel as a product of single-qubit Kraus maps
/// {diag(1, 1 - gamma), diag(0, sqrt(gamma (2 - gamma)))}.
ComplexMatrix dephase_kraus(const ComplexMatrix& rho, int M, double gamma);

/// A_k = int_0^1 e^{isH} S_k e^{-isH} ds for H = sum_k phi_k S_k, so that
/// d_k e^{-iH} = -i e^{-iH} A_k.
std::array<ComplexMatrix, 3> generators(int M, const std::array<double, 3>& phi);

/// d_k rho = deph(i U [rho0, A_k] U^dagger).
std::vector<ComplexMatrix> generator_derivatives(const MagnetometrySpec& spec, const ComplexVector& probe);

/// rho = deph(U |probe><probe| U^dagger), theta = phi, identity weight.
QuantumModel encode_and_dephase(const MagnetometrySpec& spec, const ComplexVector& probe);
QuantumModel encode_and_dephase(const MagnetometrySpec& spec);

/// Relabels qubits: qubit j of the input becomes qubit perm[j].
ComplexVector permute_qubits(const ComplexVector& state, const std::vector<int>& perm);

}  // namespace qbounds
