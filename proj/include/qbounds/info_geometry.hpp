#pragma once

#include <vector>

#include "qbounds/linalg.hpp"
#include "qbounds/model.hpp"
#include "qbounds/spectral.hpp"

namespace qbounds {

struct SldSet {
    std::vector<ComplexMatrix> L;  // original basis, kernel-kernel block zero
    RealMatrix J;                  // Re Tr[rho L_i L_j]
    RealMatrix D;                  // Im Tr[L_j L_i rho]
};

struct RldSet {
    bool exists = false;
    std::vector<ComplexMatrix> L;  // rho^+ drho_i
    ComplexMatrix J;               // Tr[drho_i rho^+ drho_j]
    ComplexMatrix leakage;         // Tr[drho_i P_ker drho_j]
    double max_leakage = 0.0;
};

struct Povm {
    std::vector<ComplexMatrix> elements;
};

SldSet compute_slds(const QuantumModel& model, const SpectralData& spectral);
SldSet compute_slds(const QuantumModel& model);

/// tr[W J^-1]. Throws SingularModel when J is numerically singular.
double sld_bound(const SldSet& slds, const RealMatrix& weight);
/// Smallest eigenvalue of J relative to the largest; <= 1e-10 means singular.
bool is_singular_qfim(const RealMatrix& j);

RldSet compute_rlds(const QuantumModel& model, const SpectralData& spectral, double leak_tol = 1e-8);
RldSet compute_rlds(const QuantumModel& model);

/// tr[W Re J^-1] + || sqrt(W) Im J^-1 sqrt(W) ||_1 for a given inverse.
double rld_bound_from_inverse(const ComplexMatrix& j_inv, const RealMatrix& weight);
/// Throws RldUnsupported when the RLDs do not exist.
double rld_bound(const RldSet& rlds, const RealMatrix& weight);
/// Limit of the bound for rho + eps P_ker as eps -> 0. Equals rld_bound when
/// the RLDs exist; otherwise the inverse reduces to the null space of the
/// leakage matrix.
double rld_limit_bound(const RldSet& rlds, const RealMatrix& weight);

struct WeakCommutativity {
    RealMatrix D;
    double frobenius = 0.0;
};
WeakCommutativity weak_commutativity(const SldSet& slds);

/// Validates elements (PSD within 1e-10, completeness within 1e-9).
void check_povm(const Povm& povm, int dim);

/// p_w = Tr[rho Pi_w]; outcomes with p_w <= p_floor are skipped when their
/// gradients are below sqrt(p_floor), otherwise IllConditionedOutcome.
RealMatrix classical_fim(const QuantumModel& model, const Povm& povm, double p_floor = 1e-12);

/// Rank-one projectors onto the eigenvectors of L_which. Degenerate
/// eigenspaces are resolved by diagonalizing rho compressed to them.
Povm sld_eigenbasis_povm(const SldSet& slds, int which, const ComplexMatrix& rho);

}  // namespace qbounds
