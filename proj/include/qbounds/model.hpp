#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qbounds/linalg.hpp"

namespace qbounds {

/// A quantum statistical model evaluated at one parameter point: the state,
/// its parameter derivatives and the weight matrix of the scalar cost.
struct QuantumModel {
    RealVector theta;
    ComplexMatrix rho;
    std::vector<ComplexMatrix> drho;
    RealMatrix weight;

    int dim() const { return static_cast<int>(rho.rows()); }
    int n_params() const { return static_cast<int>(drho.size()); }
};

/// Tolerances of the model invariants.
struct ModelTolerances {
    double herm_tol = kHermTol;
    double trace_tol = 1e-10;
    double psd_tol = 1e-10;
};

/// Returns one message per violated invariant (empty when the model is valid).
std::vector<std::string> model_violations(const QuantumModel& model, const ModelTolerances& tol = {});

/// Builds a model, defaulting the weight to identity, and checks every
/// invariant. Throws InvariantViolation listing all failures.
QuantumModel make_model(RealVector theta, ComplexMatrix rho, std::vector<ComplexMatrix> drho,
                        RealMatrix weight = RealMatrix());

/// Reads the JSON model format:
/// {"dim", "n_params", "theta", "rho", "drho", "weight"?}, complex matrices as
/// [[[re, im], ...], ...] row-major.
QuantumModel load_model(const std::filesystem::path& path);
QuantumModel parse_model(const std::string& json_text);
std::string model_to_json(const QuantumModel& model);
void save_model(const QuantumModel& model, const std::filesystem::path& path);

using StateFunction = std::function<ComplexMatrix(const RealVector&)>;

/// Central differences (rho(theta + h e_i) - rho(theta - h e_i)) / 2h, Hermitized.
std::vector<ComplexMatrix> finite_difference_derivatives(const StateFunction& state_fn, const RealVector& theta,
                                                         double step = 1e-5);

}  // namespace qbounds
