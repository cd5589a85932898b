#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qbounds/hcrb.hpp"
#include "qbounds/info_geometry.hpp"
#include "qbounds/model.hpp"

namespace qbounds {

/// Parameters of the built-in model generators. Only the fields of the
/// selected kind are used.
struct BuiltinSpec {
    std::string kind = "interferometer";  // or "magnetometry"
    // interferometer
    int photons = 2;
    std::string input = "hb";  // "hb" (Holland-Burnett) or "onephoton"
    double c1sq = 0.5;         // |c_1|^2 of the one-photon probe
    double eta = 0.5;
    double phase = 0.0;
    // magnetometry
    int qubits = 2;
    double gamma = 0.0;
    std::array<double, 3> phi{1.0, 1.0, 1.0};
};

QuantumModel build_builtin(const BuiltinSpec& spec);
std::string describe(const BuiltinSpec& spec);
/// Sweepable names: eta, phase, c1sq (interferometer); gamma, phi (all three
/// components), phi1, phi2, phi3 (magnetometry). Throws InvalidArgument.
void set_builtin_param(BuiltinSpec& spec, const std::string& name, double value);

/// Measurement whose classical bound goes into the panel.
struct PovmChoice {
    enum class Kind { None, SldEigenbasis, Explicit } kind = Kind::None;
    int parameter = 0;  // for SldEigenbasis
    Povm povm;          // for Explicit
};

/// "none", "sld:<i>", or a path to {"elements": [complex matrices]}.
PovmChoice parse_povm_choice(const std::string& text);
Povm parse_povm(const std::string& json_text);
/// Replaces the weight by a JSON real matrix; throws ParseError or InvariantViolation.
QuantumModel with_weight_file(const QuantumModel& model, const std::string& path);

struct BoundsReport {
    std::string descriptor;
    RealVector theta;
    std::optional<double> C_H;
    std::optional<double> C_S;
    std::optional<double> C_R;  // limit of the RLD bound; empty if it cannot be evaluated
    std::optional<double> C_classical;
    RealMatrix D;
    std::optional<double> D_fro;
    double gap = 0.0;
    std::string status = "optimal";  // "optimal" or an error kind name
    std::string message;
    int iterations = 0;
    double wall_ms = 0.0;

    bool ok() const { return status == "optimal"; }
    std::optional<double> reldiff_sld() const;        // 1 - C_S / C_H
    std::optional<double> reldiff_classical() const;  // 1 - C_H / C_classical
};

/// Never throws for library errors: they end up in status and message.
BoundsReport compute_bounds(const QuantumModel& model, const std::string& descriptor, const PovmChoice& povm = {},
                            const HcrbOptions& options = {});

std::string bounds_report_json(const BoundsReport& report);

struct SweepSpec {
    std::string param;
    double start = 0.0;
    double stop = 0.0;
    int points = 0;

    /// Evenly spaced, endpoints included; a single point sits at start.
    std::vector<double> grid() const;
};

/// "<param>:<start>:<stop>:<points>"; throws InvalidArgument.
SweepSpec parse_sweep(const std::string& text);

struct SweepRow {
    std::string param_name;
    double param_value = 0.0;
    BoundsReport report;
};

/// Evaluates every grid point independently on a pool of `jobs` workers
/// (0: hardware concurrency). Row order follows the grid.
std::vector<SweepRow> run_sweep(const BuiltinSpec& base, const SweepSpec& sweep, const PovmChoice& povm,
                                const HcrbOptions& options = {}, int jobs = 0);

inline constexpr const char* kSweepHeader =
    "param_name,param_value,C_H,C_S,C_R,C_classical,D_fro,reldiff_SLD,reldiff_classical,gap,status,iterations,wall_ms";
/// Header plus one row per point; missing values are empty fields.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace qbounds
