#include "qbounds/measurement_search.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "qbounds/errors.hpp"
#include "qbounds/magnetometry.hpp"
#include "qbounds/serialize.hpp"
#include "parallel.hpp"

namespace qbounds {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kPhaseTol = 1e-9;
constexpr double kPFloor = 1e-12;
// Stand-in for +infinity inside the simplex search, which rejects non-finite values.
constexpr double kPenalty = 1e30;

int qubit_count(int d) {
    if (d < 2 || (d & (d - 1)) != 0) throw Error(ErrorKind::InvalidArgument, "dimension must be a power of two");
    return std::countr_zero(static_cast<unsigned>(d));
}

const std::vector<ComplexMatrix>& cached_basis(int d) {
    static std::mutex mu;
    static std::vector<std::pair<int, std::vector<ComplexMatrix>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& [dim, b] : cache)
        if (dim == d) return b;
    cache.emplace_back(d, pauli_product_basis(d));
    return cache.back().second;
}

/// Orthonormal eigenbasis of V_x with degenerate eigenspaces completed from
/// the standard basis.
ComplexMatrix measurement_basis(const RealVector& x, int d) {
    const auto& basis = cached_basis(d);
    if (x.size() != static_cast<Eigen::Index>(basis.size()))
        throw Error(ErrorKind::DimensionMismatch, "need d^2 = " + std::to_string(basis.size()) + " coefficients");
    if (!x.allFinite()) throw Error(ErrorKind::InvalidArgument, "coefficients must be finite");
    ComplexMatrix k = ComplexMatrix::Zero(d, d);
    for (Eigen::Index a = 0; a < x.size(); ++a)
        if (x(a) != 0.0) k += x(a) * basis[a];
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(k));
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigSolverFailure, "generator diagonalization failed");

    // Group eigenvalues of V = exp(-iK) by their phase on the unit circle.
    std::vector<double> phase(d);
    for (int i = 0; i < d; ++i) {
        double t = std::fmod(es.eigenvalues()(i), kTwoPi);
        phase[i] = t < 0 ? t + kTwoPi : t;
    }
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return phase[a] < phase[b]; });
    std::vector<std::vector<int>> groups{{order[0]}};
    for (int i = 1; i < d; ++i) {
        if (phase[order[i]] - phase[order[i - 1]] <= kPhaseTol)
            groups.back().push_back(order[i]);
        else
            groups.push_back({order[i]});
    }
    if (groups.size() > 1 && phase[order[0]] + kTwoPi - phase[order[d - 1]] <= kPhaseTol) {
        groups.front().insert(groups.front().end(), groups.back().begin(), groups.back().end());
        groups.pop_back();
    }

    ComplexMatrix u(d, d);
    int col = 0;
    for (const auto& g : groups) {
        const int m = static_cast<int>(g.size());
        if (m == 1) {
            u.col(col++) = es.eigenvectors().col(g[0]);
            continue;
        }
        ComplexMatrix b(d, m);
        for (int j = 0; j < m; ++j) b.col(j) = es.eigenvectors().col(g[j]);
        const ComplexMatrix p = b * b.adjoint();
        const int first = col;
        for (int j = 0; j < d && col - first < m; ++j) {
            ComplexVector v = p.col(j);
            for (int c = first; c < col; ++c) v -= u.col(c).dot(v) * u.col(c);
            const double nv = v.norm();
            if (nv > 1e-6) u.col(col++) = v / nv;
        }
        if (col - first != m) throw Error(ErrorKind::EigSolverFailure, "could not complete a degenerate eigenspace");
    }
    return u;
}

/// rho = B B^dagger over its support. Probabilities are taken as |B^dagger e|^2,
/// which stays accurate to relative precision when they are tiny; the
/// optimizer otherwise exploits rounding in e^dagger rho e near p = 0.
ComplexMatrix density_factor(const ComplexMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho));
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigSolverFailure, "state diagonalization failed");
    const RealVector& ev = es.eigenvalues();
    const double cut = 1e-14 * std::max(1.0, ev.maxCoeff());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cut) keep.push_back(i);
    ComplexMatrix b(rho.rows(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) b.col(j) = es.eigenvectors().col(keep[j]) * std::sqrt(ev(keep[j]));
    return b;
}

double crb_from_basis(const QuantumModel& model, const ComplexMatrix& factor, const ComplexMatrix& u) {
    const int n = model.n_params();
    RealMatrix f = RealMatrix::Zero(n, n);
    RealVector g(n);
    const ComplexMatrix amp = u.adjoint() * factor;
    for (Eigen::Index w = 0; w < u.cols(); ++w) {
        const auto e = u.col(w);
        const double p = amp.row(w).squaredNorm();
        for (int i = 0; i < n; ++i) g(i) = e.dot(model.drho[i] * e).real();
        if (p <= kPFloor) {
            if (g.cwiseAbs().maxCoeff() <= std::sqrt(kPFloor)) continue;
            return std::numeric_limits<double>::infinity();
        }
        f.noalias() += g * g.transpose() / p;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(f);
    const RealVector& ev = es.eigenvalues();
    if (!(ev.maxCoeff() > 0.0) || ev.minCoeff() <= 1e-12 * ev.maxCoeff()) return std::numeric_limits<double>::infinity();
    const RealMatrix inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return (model.weight * inv).trace();
}

struct Objective {
    const QuantumModel* model;
    ComplexMatrix factor;
    int d;
};

double gsl_objective(const gsl_vector* v, void* params) {
    const auto* obj = static_cast<const Objective*>(params);
    RealVector x(v->size);
    for (std::size_t i = 0; i < v->size; ++i) x(i) = gsl_vector_get(v, i);
    const double val = crb_from_basis(*obj->model, obj->factor, measurement_basis(x, obj->d));
    return std::isfinite(val) ? std::min(val, kPenalty) : kPenalty;
}

RestartRecord run_restart(const QuantumModel& model, const SearchOptions& opt, int restart) {
    const int d = model.dim();
    const int nx = d * d;
    RestartRecord rec;
    rec.restart = restart;
    rec.stream_seed = restart_seed(opt.seed, restart);
    std::mt19937_64 rng(rec.stream_seed);
    std::uniform_real_distribution<double> unif(-std::numbers::pi, std::numbers::pi);

    Objective obj{&model, density_factor(model.rho), d};
    gsl_multimin_function fn{&gsl_objective, static_cast<std::size_t>(nx), &obj};
    gsl_vector* x = gsl_vector_alloc(nx);
    gsl_vector* step = gsl_vector_alloc(nx);
    for (int i = 0; i < nx; ++i) gsl_vector_set(x, i, unif(rng));
    gsl_vector_set_all(step, opt.initial_step);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, nx);

    // A converged simplex is rebuilt around its best vertex until that stops
    // helping; collapsed simplices are common in this many dimensions.
    double last = std::numeric_limits<double>::infinity();
    int it = 0;
    while (it < opt.max_iterations) {
        if (gsl_multimin_fminimizer_set(s, &fn, x, step) != GSL_SUCCESS) break;
        bool converged = false;
        while (it < opt.max_iterations) {
            ++it;
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
            if (gsl_multimin_fminimizer_size(s) < opt.tol) {
                converged = true;
                break;
            }
        }
        gsl_vector_memcpy(x, gsl_multimin_fminimizer_x(s));
        const double val = gsl_multimin_fminimizer_minimum(s);
        const bool improved = val < last - 1e-13 * std::abs(last);
        last = std::min(last, val);
        if (!converged || !improved) break;
    }
    rec.iterations = it;
    rec.x.resize(nx);
    for (int i = 0; i < nx; ++i) rec.x(i) = gsl_vector_get(x, i);
    rec.value = projective_crb(model, rec.x);
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return rec;
}

}  // namespace

std::vector<ComplexMatrix> pauli_product_basis(int d) {
    const int q = qubit_count(d);
    std::vector<ComplexMatrix> single{ComplexMatrix::Identity(2, 2), pauli(0), pauli(1), pauli(2)};
    std::vector<ComplexMatrix> out{ComplexMatrix::Identity(1, 1)};
    for (int j = 0; j < q; ++j) {
        std::vector<ComplexMatrix> next;
        next.reserve(out.size() * 4);
        for (const auto& a : out)
            for (const auto& s : single) next.push_back(kron(a, s));
        out = std::move(next);
    }
    return out;
}

Povm projective_povm(const RealVector& x, int d) {
    const ComplexMatrix u = measurement_basis(x, d);
    Povm povm;
    for (int w = 0; w < d; ++w) povm.elements.push_back(u.col(w) * u.col(w).adjoint());
    return povm;
}

double projective_crb(const QuantumModel& model, const RealVector& x) {
    return crb_from_basis(model, density_factor(model.rho), measurement_basis(x, model.dim()));
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

SearchResult optimize_projective(const QuantumModel& model, const SearchOptions& opt) {
    if (opt.restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be at least 1");
    if (!(opt.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
    if (opt.max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "iteration cap must be positive");
    qubit_count(model.dim());

    static std::once_flag quiet;
    std::call_once(quiet, [] { gsl_set_error_handler_off(); });

    SearchResult res;
    res.trace.resize(opt.restarts);
    detail::parallel_for(opt.restarts, opt.jobs, [&](int r) { res.trace[r] = run_restart(model, opt, r); });

    res.restarts_used = opt.restarts;
    res.best_value = std::numeric_limits<double>::infinity();
    for (const auto& rec : res.trace)
        if (rec.value < res.best_value) {
            res.best_value = rec.value;
            res.best_x = rec.x;
        }
    if (!std::isfinite(res.best_value))
        throw Error(ErrorKind::AllRestartsFailed, "every restart ended at a singular classical Fisher matrix");
    return res;
}

std::string search_trace_csv(const SearchResult& result) {
    std::ostringstream os;
    os << "restart,stream_seed,value,iterations\n";
    for (const auto& rec : result.trace) {
        os << rec.restart << ',' << rec.stream_seed << ',';
        if (std::isfinite(rec.value))
            write_json_number(os, rec.value);
        else
            os << "inf";
        os << ',' << rec.iterations << '\n';
    }
    return os.str();
}

std::string search_result_json(const SearchResult& result) {
    std::ostringstream os;
    os << "{\"best_value\": ";
    write_json_number(os, result.best_value);
    os << ", \"best_x\": ";
    write_json_vector(os, result.best_x);
    os << ", \"restarts_used\": " << result.restarts_used << ", \"trace\": [";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const auto& rec = result.trace[i];
        os << (i ? ", " : "") << "{\"restart\": " << rec.restart << ", \"stream_seed\": " << rec.stream_seed
           << ", \"value\": ";
        write_json_number(os, rec.value);
        os << ", \"iterations\": " << rec.iterations << ", \"x\": ";
        write_json_vector(os, rec.x);
        os << '}';
    }
    os << "]}";
    return os.str();
}

}  // namespace qbounds
