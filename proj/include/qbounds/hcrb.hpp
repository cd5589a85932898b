#pragma once

#include <vector>

#include "qbounds/conic.hpp"
#include "qbounds/info_geometry.hpp"
#include "qbounds/model.hpp"
#include "qbounds/quotient.hpp"

namespace qbounds {

/// The Holevo bound as a semidefinite program over (V, X):
///   minimize tr[W V]  s.t.  [[V, X^T R^dag], [R X, I]] >= 0,  X^T dS = I,
/// embedded as a real LMI of size 2(n + rt).
struct HcrbProgram {
    int n = 0;
    int dt = 0;
    int rt = 0;
    QuotientFrame frame;
    ComplexMatrix S;
    ComplexMatrix R;
    RealMatrix dS;  // dt x n, columns vectorize(drho_i)
    RealMatrix W;
    ConicProblem conic;

    int n_v() const { return n * (n + 1) / 2; }
    /// Upper-triangle column-major index of V(a, b), a <= b.
    int v_index(int a, int b) const;
    int x_index(int a, int j) const { return n_v() + j * dt + a; }

    RealMatrix unpack_v(const RealVector& v) const;
    RealMatrix unpack_x(const RealVector& v) const;
    RealVector pack(const RealMatrix& V, const RealMatrix& X) const;
    /// The LMI matrix -(sum v_i F_i + G); PSD iff (V, X) is feasible for the cone.
    RealMatrix lmi(const RealVector& v) const;
};

struct HcrbOptions {
    ConicOptions conic;
    bool full_space = false;  // frame with r = d instead of the quotient
    std::optional<double> rank_tol;
};

HcrbProgram assemble_hcrb(const QuantumModel& model, const QuotientFrame& frame, const ComplexMatrix& R,
                          const RealMatrix& weight);
HcrbProgram assemble_hcrb(const QuantumModel& model, const HcrbOptions& options = {});

struct HcrbResult {
    double value = 0.0;
    RealMatrix V;
    RealMatrix Xvec;               // dt x n
    std::vector<ComplexMatrix> X;  // kernel-kernel block zero
    ComplexMatrix Z;
    double h_at_opt = 0.0;
    double gap = 0.0;
    ConicStatus status = ConicStatus::NumericalFailure;
    int iterations = 0;
    int dt = 0;
    int rt = 0;
    CertificateReport certificates;
};

/// Throws SingularModel, SolverFailure, or GapTooLarge.
HcrbResult solve_hcrb(const QuantumModel& model, const HcrbOptions& options = {});
HcrbResult solve_hcrb(const HcrbProgram& program, const HcrbOptions& options = {});

/// Z_ij = Tr[X_i X_j rho].
ComplexMatrix holevo_z(const std::vector<ComplexMatrix>& X, const ComplexMatrix& rho);
/// tr[W Re Z] + || sqrt(W) Im Z sqrt(W) ||_1.
double holevo_value(const ComplexMatrix& Z, const RealMatrix& weight);
double holevo_function(const std::vector<ComplexMatrix>& X, const QuantumModel& model, const RealMatrix& weight);

struct FeasibleStart {
    RealMatrix V;
    std::vector<ComplexMatrix> X;
    RealMatrix Xvec;
    double margin = 0.0;  // smallest eigenvalue of the LMI at (V, X)
};

/// X = L J^-1, V = J^-1 + I; throws SingularModel.
FeasibleStart feasible_start(const QuantumModel& model);
FeasibleStart feasible_start(const HcrbProgram& program, const QuantumModel& model);

}  // namespace qbounds
