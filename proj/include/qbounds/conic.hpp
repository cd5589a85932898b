#pragma once

#include <string>
#include <vector>

#include "qbounds/linalg.hpp"

namespace qbounds {

/// One entry of a symmetric coefficient matrix; both (row, col) and
/// (col, row) are stored explicitly for off-diagonal positions.
struct SymEntry {
    int row;
    int col;
    double value;
};

/// minimize c^T v  subject to  sum_i v_i F_i + G <= 0 (negative semidefinite)
/// and A v = b.
///
/// Each F_i is stored as D C_i D^T with a shared m x q dictionary D and a
/// sparse symmetric q x q coefficient matrix C_i. Problems built from dense
/// matrices use D = I.
struct ConicProblem {
    int k = 0;
    int m = 0;
    RealVector c;
    RealMatrix dictionary;
    std::vector<std::vector<SymEntry>> coeffs;
    RealMatrix G;
    RealMatrix A;
    RealVector b;

    int q() const { return static_cast<int>(dictionary.cols()); }
    int n_eq() const { return static_cast<int>(A.rows()); }

    RealMatrix F(int i) const;
    /// sum_i v_i F_i
    RealMatrix apply(const RealVector& v) const;
    /// (Tr[F_i Z])_i
    RealVector adjoint(const RealMatrix& z) const;

    /// Throws DimensionMismatch or InvalidArgument on inconsistent data.
    void validate() const;

    static ConicProblem from_dense(RealVector c, const std::vector<RealMatrix>& F, RealMatrix G, RealMatrix A,
                                   RealVector b);
};

enum class ConicStatus { Optimal, Infeasible, Unbounded, NumericalFailure };
std::string_view to_string(ConicStatus s);

enum class ConicBackend { Factored, DenseReference };
std::string_view to_string(ConicBackend b);
/// Factored unless QBOUNDS_SOLVER=sparse-reference (or dense-reference).
ConicBackend default_backend();

struct ConicOptions {
    double eq_tol = 1e-8;
    double psd_tol = 1e-8;
    double gap_tol = 1e-8;
    double dual_tol = 1e-8;
    double infeas_tol = 1e-8;
    int max_iterations = 200;
    bool trace = false;  // per-iteration log on stderr
    ConicBackend backend = default_backend();
};

struct ConicSolution {
    ConicStatus status = ConicStatus::NumericalFailure;
    RealVector v;
    RealVector y;  // equality multipliers
    RealMatrix Z;  // dual matrix, Z >= 0
    double objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;  // max(eq residual, psd residual)
    double dual_residual = 0.0;
    double rel_gap = 0.0;
    int iterations = 0;
    std::string message;
};

ConicSolution solve_conic(const ConicProblem& problem, const ConicOptions& options = {});

struct CertificateCheck {
    std::string name;
    double value;
    double tolerance;
    bool pass;
};

struct CertificateReport {
    std::vector<CertificateCheck> checks;
    bool all_pass() const;
};

/// Recomputes every optimality residual from the problem data alone.
CertificateReport validate_certificates(const ConicProblem& problem, const ConicSolution& solution,
                                        const ConicOptions& options = {});

/// {"k", "m", "c", "F", "G", "A", "b"} with dense row-major matrices.
std::string conic_to_json(const ConicProblem& problem);
ConicProblem conic_from_json(const std::string& text);

}  // namespace qbounds
