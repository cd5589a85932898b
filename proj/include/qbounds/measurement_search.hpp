#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbounds/info_geometry.hpp"
#include "qbounds/linalg.hpp"
#include "qbounds/model.hpp"

namespace qbounds {

/// Hermitian basis of products of {1, sigma_x, sigma_y, sigma_z} on log2(d)
/// qubits; d^2 elements, first qubit most significant. Throws InvalidArgument
/// unless d is a power of two.
std::vector<ComplexMatrix> pauli_product_basis(int d);

/// Rank-one projectors onto the eigenvectors of V_x = exp(-i sum_a x_a B_a).
/// Eigenvalues of V closer than 1e-9 on the unit circle are treated as one
/// eigenspace, whose basis is taken from the projections of the standard
/// basis vectors in order.
Povm projective_povm(const RealVector& x, int d);

/// tr[W F(rho, Pi_x)^-1], or +infinity if the CFIM is singular or ill-conditioned.
double projective_crb(const QuantumModel& model, const RealVector& x);

struct SearchOptions {
    int restarts = 10;
    std::uint64_t seed = 0;
    double tol = 1e-9;           // simplex size at convergence
    int max_iterations = 5000;   // per restart
    double initial_step = 0.25;  // simplex edge along each coordinate
    int jobs = 0;                // 0: hardware concurrency
};

struct RestartRecord {
    int restart = 0;
    std::uint64_t stream_seed = 0;
    double value = 0.0;  // +infinity if the restart failed
    int iterations = 0;
    RealVector x;
};

struct SearchResult {
    double best_value = 0.0;
    RealVector best_x;
    int restarts_used = 0;
    std::vector<RestartRecord> trace;
};

/// Per-restart stream seed derived from the master seed.
std::uint64_t restart_seed(std::uint64_t seed, int restart);

/// Nelder-Mead from independent uniform [-pi, pi]^(d^2) starting points.
/// Deterministic for a given seed regardless of jobs. Throws
/// AllRestartsFailed if no restart reaches a finite value.
SearchResult optimize_projective(const QuantumModel& model, const SearchOptions& options = {});

/// restart,stream_seed,value,iterations
std::string search_trace_csv(const SearchResult& result);
/// {"best_value", "best_x", "restarts_used", "trace": [...]}
std::string search_result_json(const SearchResult& result);

}  // namespace qbounds
