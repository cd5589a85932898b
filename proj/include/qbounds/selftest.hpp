#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qbounds/model.hpp"

namespace qbounds {

struct CheckResult {
    int criterion = 0;
    std::string title;
    bool pass = false;
    bool reduced = false;  // fast subset of the full check
    std::string detail;
    double seconds = 0.0;
};

struct SelftestOptions {
    bool full = false;
    int jobs = 0;
    std::function<void(const CheckResult&)> on_result;  // called as each check finishes
};

/// Runs the acceptance checks 1..10; the fast mode uses reduced grids where
/// the full one is slow.
std::vector<CheckResult> run_selftest(const SelftestOptions& options = {});
CheckResult run_check(int criterion, const SelftestOptions& options = {});

std::string selftest_json(const std::vector<CheckResult>& results);
/// "criterion N: PASS|FAIL  title  (detail, seconds)"
std::string format_check(const CheckResult& r);

/// Random model with rho of the given rank and derivatives of the form
/// i[H_i, rho] + V_s A_i V_s^dagger (tr A_i = 0), resampled until the QFIM is
/// regular. The weight is identity unless random_weight is set.
QuantumModel random_model(int d, int n, int rank, std::uint64_t seed, bool random_weight = false);

/// Haar-random pure state.
ComplexVector haar_state(int d, std::uint64_t seed);

/// Minimizes h(X) over locally unbiased Hermitian X with a simplex search in
/// an explicit d^2-dimensional Hermitian coordinate system; independent of the
/// quotient construction and the conic solver. For small d only.
double brute_force_holevo(const QuantumModel& model, int rounds = 40);

}  // namespace qbounds
