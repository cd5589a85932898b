// Primal-dual interior-point method for
//   minimize c^T x  s.t.  G(x) + s = h,  A x = b,  s >= 0
// with G(x) = sum_i x_i F_i and h = -G_const, via the homogeneous self-dual
// embedding, Nesterov-Todd scaling and Mehrotra predictor-corrector steps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>

#include "qbounds/conic.hpp"
#include "qbounds/errors.hpp"
#include "dictionary_map.hpp"

namespace qbounds {

namespace {

class ConeOperator {
public:
    virtual ~ConeOperator() = default;
    virtual RealMatrix apply(const RealVector& x) const = 0;
    virtual RealVector adjoint(const RealMatrix& z) const = 0;

    /// Works with F~_i = T F_i T^T from here on.
    virtual void set_scaling(const RealMatrix& t) = 0;
    virtual RealMatrix apply_scaled(const RealVector& x) const = 0;
    virtual RealVector adjoint_scaled(const RealMatrix& z) const = 0;
    /// H_ij = Tr[F~_i F~_j]
    virtual RealMatrix schur_scaled() const = 0;
};

class FactoredOperator final : public ConeOperator {
public:
    explicit FactoredOperator(const ConicProblem& p) : p_(p), map_(p.coeffs, p.q()), dt_(p.dictionary) {
        for (const auto& c : p.coeffs) max_nnz_ = std::max(max_nnz_, c.size());
    }

    RealMatrix apply(const RealVector& x) const override { return map_.apply(p_.dictionary, x); }
    RealVector adjoint(const RealMatrix& z) const override { return map_.adjoint(p_.dictionary, z); }

    void set_scaling(const RealMatrix& t) override { dt_.noalias() = t * p_.dictionary; }

    RealMatrix apply_scaled(const RealVector& x) const override { return map_.apply(dt_, x); }
    RealVector adjoint_scaled(const RealMatrix& z) const override { return map_.adjoint(dt_, z); }

    RealMatrix schur_scaled() const override {
        RealMatrix ph(p_.q(), p_.q());
        ph.setZero();
        ph.selfadjointView<Eigen::Lower>().rankUpdate(dt_.transpose());
        ph.triangularView<Eigen::StrictlyUpper>() = ph.transpose();
        const int k = p_.k;
        RealMatrix h(k, k);
        if (max_nnz_ <= 64) {
            // Tr[C_i Ph C_j Ph] = sum C_i(a,b) C_j(c,d) Ph(b,c) Ph(d,a)
            for (int j = 0; j < k; ++j) {
                const auto& cj = p_.coeffs[j];
                for (int i = 0; i <= j; ++i) {
                    double t = 0.0;
                    for (const auto& e : p_.coeffs[i])
                        for (const auto& f : cj) t += e.value * f.value * ph(e.col, f.row) * ph(f.col, e.row);
                    h(i, j) = t;
                    h(j, i) = t;
                }
            }
        } else {
            const int qd = p_.q();
            for (int j = 0; j < k; ++j) {
                RealMatrix pc = RealMatrix::Zero(qd, qd);
                for (const auto& f : p_.coeffs[j]) pc.col(f.col) += f.value * ph.col(f.row);
                const RealMatrix tj = pc * ph;
                for (int i = 0; i <= j; ++i) {
                    double t = 0.0;
                    for (const auto& e : p_.coeffs[i]) t += e.value * tj(e.col, e.row);
                    h(i, j) = t;
                    h(j, i) = t;
                }
            }
        }
        return h;
    }

private:
    const ConicProblem& p_;
    detail::DictionaryMap map_;
    RealMatrix dt_;
    std::size_t max_nnz_ = 0;
};

/// Reference path on explicit dense F_i; O(k m^3) per scaling.
class DenseOperator final : public ConeOperator {
public:
    explicit DenseOperator(const ConicProblem& p) {
        f_.reserve(p.k);
        for (int i = 0; i < p.k; ++i) f_.push_back(p.F(i));
        ft_ = f_;
        m_ = p.m;
    }

    RealMatrix apply(const RealVector& x) const override { return combine(f_, x); }
    RealVector adjoint(const RealMatrix& z) const override { return project(f_, z); }

    void set_scaling(const RealMatrix& t) override {
        for (std::size_t i = 0; i < f_.size(); ++i) ft_[i] = t * f_[i] * t.transpose();
    }
    RealMatrix apply_scaled(const RealVector& x) const override { return combine(ft_, x); }
    RealVector adjoint_scaled(const RealMatrix& z) const override { return project(ft_, z); }

    RealMatrix schur_scaled() const override {
        const auto k = static_cast<Eigen::Index>(ft_.size());
        RealMatrix h(k, k);
        for (Eigen::Index j = 0; j < k; ++j)
            for (Eigen::Index i = 0; i <= j; ++i) {
                h(i, j) = (ft_[i].array() * ft_[j].array()).sum();
                h(j, i) = h(i, j);
            }
        return h;
    }

private:
    RealMatrix combine(const std::vector<RealMatrix>& f, const RealVector& x) const {
        RealMatrix out = RealMatrix::Zero(m_, m_);
        for (std::size_t i = 0; i < f.size(); ++i) out += x(i) * f[i];
        return out;
    }
    static RealVector project(const std::vector<RealMatrix>& f, const RealMatrix& z) {
        RealVector out(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) out(i) = (f[i].array() * z.array()).sum();
        return out;
    }

    std::vector<RealMatrix> f_, ft_;
    int m_ = 0;
};

RealMatrix sym(const RealMatrix& a) { return 0.5 * (a + a.transpose()); }

double inner(const RealMatrix& a, const RealMatrix& b) { return (a.array() * b.array()).sum(); }

/// Reduced KKT system in scaled variables (dz~ = R^T dz R, bz~ = R^-1 bz R^-T):
///   A^T dy + G~^T dz~ = bx,  A dx = by,  G~ dx - dz~ = bz~.
class KktSolver {
public:
    KktSolver(const ConicProblem& p, ConeOperator& op) : p_(p), op_(op) {}

    bool factor(const RealMatrix& t) {
        op_.set_scaling(t);
        RealMatrix h = op_.schur_scaled();
        const int ne = p_.n_eq();
        if (ne) h.noalias() += p_.A.transpose() * p_.A;
        for (int i = 0; i < p_.k; ++i)
            if (h(i, i) == 0.0) h(i, i) = 1.0;
        llt_.compute(h);
        use_llt_ = llt_.info() == Eigen::Success;
        if (!use_llt_) {
            ldlt_.compute(h);
            if (ldlt_.info() != Eigen::Success) return false;
        }
        if (ne) {
            const RealMatrix hinv_at = solve_h(RealMatrix(p_.A.transpose()));
            schur_a_.compute(sym(p_.A * hinv_at));
            if (schur_a_.info() != Eigen::Success) return false;
        }
        return true;
    }

    void solve(const RealVector& bx, const RealVector& by, const RealMatrix& bz, RealVector& dx, RealVector& dy,
               RealMatrix& dz) const {
        solve_once(bx, by, bz, dx, dy, dz);
        // One step of iterative refinement; the third block holds exactly.
        RealVector ex = bx - op_.adjoint_scaled(dz);
        if (p_.n_eq()) ex -= p_.A.transpose() * dy;
        const RealVector ey = p_.n_eq() ? RealVector(by - p_.A * dx) : RealVector(0);
        RealVector cx, cy;
        RealMatrix cz;
        solve_once(ex, ey, RealMatrix::Zero(bz.rows(), bz.cols()), cx, cy, cz);
        dx += cx;
        if (p_.n_eq()) dy += cy;
        dz += cz;
    }

private:
    template <typename T>
    T solve_h(const T& rhs) const {
        if (use_llt_) return llt_.solve(rhs);
        return ldlt_.solve(rhs);
    }

    void solve_once(const RealVector& bx, const RealVector& by, const RealMatrix& bz, RealVector& dx, RealVector& dy,
                    RealMatrix& dz) const {
        RealVector rhs = bx + op_.adjoint_scaled(bz);
        if (p_.n_eq()) {
            rhs += p_.A.transpose() * by;
            dy = schur_a_.solve(p_.A * solve_h(rhs) - by);
            dx = solve_h(RealVector(rhs - p_.A.transpose() * dy));
        } else {
            dy.resize(0);
            dx = solve_h(rhs);
        }
        dz = sym(op_.apply_scaled(dx) - bz);
    }

    const ConicProblem& p_;
    ConeOperator& op_;
    Eigen::LLT<RealMatrix> llt_;
    Eigen::LDLT<RealMatrix> ldlt_;
    bool use_llt_ = true;
    Eigen::LDLT<RealMatrix> schur_a_;
};

/// Nesterov-Todd scaling: R^-1 s R^-T = R^T z R = diag(lambda).
struct Scaling {
    RealMatrix r;
    RealMatrix rinv;
    RealVector lambda;
};

bool nt_factors(const RealMatrix& s, const RealMatrix& z, RealMatrix& left, RealMatrix& right, RealVector& lambda) {
    Eigen::LLT<RealMatrix> ls(s), lz(z);
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const RealMatrix lsm = ls.matrixL();
    const RealMatrix lzm = lz.matrixL();
    const RealMatrix prod = lzm.transpose() * lsm;
    RealMatrix u, v;
    {
        Eigen::BDCSVD<RealMatrix> svd(prod, Eigen::ComputeFullU | Eigen::ComputeFullV);
        u = svd.matrixU();
        v = svd.matrixV();
        lambda = svd.singularValues();
    }
    // BDCSVD in Eigen 3.4.0 can return factors that do not reproduce the
    // input on structured matrices; Jacobi is slower but reliable.
    if (!((u * lambda.asDiagonal() * v.transpose() - prod).norm() <= 1e-11 * std::max(1.0, prod.norm()))) {
        Eigen::JacobiSVD<RealMatrix> svd(prod, Eigen::ComputeFullU | Eigen::ComputeFullV);
        u = svd.matrixU();
        v = svd.matrixV();
        lambda = svd.singularValues();
    }
    if (!(lambda.minCoeff() > 0.0)) return false;
    const RealVector isq = lambda.cwiseSqrt().cwiseInverse();
    left = lsm * v * isq.asDiagonal();
    right = isq.asDiagonal() * u.transpose() * lzm.transpose();
    return true;
}

bool initial_scaling(const RealMatrix& s, const RealMatrix& z, Scaling& w) {
    return nt_factors(s, z, w.r, w.rinv, w.lambda);
}

/// Moves the scaling to the point (R St R^T, R^-T Zt R^-1).
bool update_scaling(Scaling& w, const RealMatrix& st, const RealMatrix& zt) {
    RealMatrix left, right;
    RealVector lambda;
    if (!nt_factors(st, zt, left, right, lambda)) return false;
    w.r = w.r * left;
    w.rinv = right * w.rinv;
    w.lambda = lambda;
    return true;
}

/// Largest t with diag(lambda) + t d >= 0.
double max_step(const RealVector& lambda, const RealMatrix& d) {
    const RealVector isq = lambda.cwiseSqrt().cwiseInverse();
    const RealMatrix m = isq.asDiagonal() * d * isq.asDiagonal();
    const double lmin = min_eigenvalue(sym(m));
    return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

RealMatrix jordan(const RealMatrix& a, const RealMatrix& b) { return 0.5 * (a * b + b * a); }

struct Direction {
    RealVector dx, dy;
    RealMatrix ds_t, dz_t;  // scaled ds, dz
    double dtau = 0.0, dkappa = 0.0;
};

}  // namespace

ConicSolution solve_conic(const ConicProblem& prob, const ConicOptions& opt) {
    prob.validate();
    if (!(opt.eq_tol > 0 && opt.psd_tol > 0 && opt.gap_tol > 0 && opt.dual_tol > 0))
        throw Error(ErrorKind::InvalidArgument, "solver tolerances must be positive");

    std::unique_ptr<ConeOperator> op;
    if (opt.backend == ConicBackend::DenseReference)
        op = std::make_unique<DenseOperator>(prob);
    else
        op = std::make_unique<FactoredOperator>(prob);

    const int m = prob.m;
    const int ne = prob.n_eq();
    const RealVector& c = prob.c;
    const RealVector& b = prob.b;
    const RealMatrix h = -prob.G;
    const RealMatrix eye = RealMatrix::Identity(m, m);

    ConicSolution sol;
    auto fail = [&](const std::string& why) {
        sol.status = ConicStatus::NumericalFailure;
        sol.message = why;
        return sol;
    };

    KktSolver kkt(prob, *op);
    if (!kkt.factor(eye)) return fail("initial KKT factorization failed");

    RealVector x, y, x1, y1;
    RealMatrix s, z, z1;
    {
        RealMatrix dz;
        kkt.solve(RealVector::Zero(prob.k), b, h, x, y, dz);
        s = -dz;
        kkt.solve(-c, RealVector::Zero(ne), RealMatrix::Zero(m, m), x1, y, z);
    }
    const double ts = -min_eigenvalue(sym(s));
    const double tz = -min_eigenvalue(sym(z));
    if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * eye;
    if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * eye;
    double tau = 1.0, kappa = 1.0;

    Scaling w;
    if (!initial_scaling(s, z, w)) return fail("initial scaling failed");

    const double cnorm = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;

    // Last iterate that already meets the full tolerances; returned if the
    // method stalls while refining further.
    ConicSolution best;
    bool have_best = false;
    auto fail_or_best = [&](const std::string& why) {
        if (!have_best) return fail(why);
        best.status = ConicStatus::Optimal;
        best.message = "stalled after reaching tolerance: " + why;
        return best;
    };

    for (int it = 0;; ++it) {
        // Residuals of the embedding.
        const RealMatrix gx = op->apply(x);
        RealVector rx = op->adjoint(z) + c * tau;
        if (ne) rx += prob.A.transpose() * y;
        const RealVector ry = ne ? RealVector(prob.A * x - b * tau) : RealVector(0);
        const RealMatrix rz = s + gx - h * tau;
        const double cx = c.dot(x);
        const double by = ne ? b.dot(y) : 0.0;
        const double hz = inner(h, z);
        const double rt = kappa + cx + by + hz;
        const double sz = inner(s, z);
        const double mu = (sz + tau * kappa) / (m + 1);

        const double pcost = cx / tau;
        const double dcost = -(by + hz) / tau;
        // Objective gap: with both residuals within tolerance it certifies
        // optimality by weak duality even when the slack drifts from the LMI.
        const double relgap = std::abs(pcost - dcost) / (1.0 + std::abs(pcost) + std::abs(dcost));
        const double compl_gap = sz / (tau * tau);
        const double eq_res = ne ? ry.cwiseAbs().maxCoeff() / tau : 0.0;
        const double psd_res = std::max(0.0, max_eigenvalue(sym(RealMatrix((rz - s) / tau))));
        const double dres = rx.cwiseAbs().maxCoeff() / tau / (1.0 + cnorm);

        sol.v = x / tau;
        sol.y = y / tau;
        sol.Z = sym(z) / tau;
        sol.objective = pcost;
        sol.dual_objective = dcost;
        sol.primal_residual = std::max(eq_res, psd_res);
        sol.dual_residual = dres;
        sol.rel_gap = relgap;
        sol.iterations = it;

        if (opt.trace)
            std::fprintf(stderr, "%3d pcost %+.9e dcost %+.9e gap %.2e sz %.2e eq %.2e psd %.2e dres %.2e tau %.2e kappa %.2e rz %.2e\n",
                         it, pcost, dcost, relgap, compl_gap, eq_res, psd_res, dres, tau, kappa, rz.norm() / tau);

        if (eq_res <= 0.5 * opt.eq_tol && psd_res <= 0.5 * opt.psd_tol && dres <= 0.5 * opt.dual_tol &&
            relgap <= opt.gap_tol) {
            sol.status = ConicStatus::Optimal;
            return sol;
        }
        if (eq_res <= 0.9 * opt.eq_tol && psd_res <= 0.9 * opt.psd_tol && dres <= 0.9 * opt.dual_tol &&
            relgap <= 0.9 * opt.gap_tol && (!have_best || relgap < best.rel_gap)) {
            best = sol;
            have_best = true;
        }

        // Infeasibility certificates.
        if (by + hz < 0.0) {
            RealVector aty = op->adjoint(z);
            if (ne) aty += prob.A.transpose() * y;
            if (aty.cwiseAbs().maxCoeff() / -(by + hz) <= opt.infeas_tol) {
                sol.status = ConicStatus::Infeasible;
                sol.message = "primal infeasibility certificate";
                return sol;
            }
        }
        if (cx < 0.0) {
            double r = ne ? (prob.A * x).cwiseAbs().maxCoeff() : 0.0;
            r = std::max(r, max_abs(gx + s));
            if (r / -cx <= opt.infeas_tol) {
                sol.status = ConicStatus::Unbounded;
                sol.message = "dual infeasibility certificate";
                return sol;
            }
        }

        if (it >= opt.max_iterations) return fail_or_best("iteration limit reached");

        if (!kkt.factor(w.rinv)) return fail_or_best("KKT factorization failed");
        const RealMatrix h_t = sym(w.rinv * h * w.rinv.transpose());
        const RealMatrix rz_t = sym(w.rinv * rz * w.rinv.transpose());

        RealVector dx1, dy1;
        RealMatrix dz1;
        kkt.solve(-c, b, h_t, dx1, dy1, dz1);
        const double q1 = -dz1.squaredNorm();

        const RealMatrix lam = w.lambda.asDiagonal();
        const RealMatrix lam2 = RealVector(w.lambda.array().square()).asDiagonal();

        auto direction = [&](double sigma, const RealMatrix& corr, double corr_tau) {
            Direction d;
            const RealMatrix rc = sigma * mu * eye - lam2 - corr;
            RealMatrix rs(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) rs(i, j) = 2.0 * rc(i, j) / (w.lambda(i) + w.lambda(j));
            const RealVector bx = -(1.0 - sigma) * rx;
            const RealVector bys = -(1.0 - sigma) * ry;
            const RealMatrix bz = sym(RealMatrix(-(1.0 - sigma) * rz_t - rs));
            RealVector dx0, dy0;
            RealMatrix dz0;
            kkt.solve(bx, bys, bz, dx0, dy0, dz0);
            const double rk = sigma * mu - tau * kappa - corr_tau;
            double q0 = c.dot(dx0) + inner(h_t, dz0);
            if (ne) q0 += b.dot(dy0);
            d.dtau = (-(1.0 - sigma) * rt - rk / tau - q0) / (-kappa / tau + q1);
            d.dx = dx0 + d.dtau * dx1;
            d.dy = ne ? RealVector(dy0 + d.dtau * dy1) : RealVector(0);
            d.dkappa = (rk - kappa * d.dtau) / tau;
            d.dz_t = sym(RealMatrix(dz0 + d.dtau * dz1));
            d.ds_t = rs - d.dz_t;
            return d;
        };

        auto step_bound = [&](const Direction& d) {
            double t = std::min(max_step(w.lambda, d.ds_t), max_step(w.lambda, d.dz_t));
            if (d.dtau < 0) t = std::min(t, -tau / d.dtau);
            if (d.dkappa < 0) t = std::min(t, -kappa / d.dkappa);
            return t;
        };

        const Direction aff = direction(0.0, RealMatrix::Zero(m, m), 0.0);
        const double alpha_aff = std::min(1.0, step_bound(aff));
        const double sigma = std::pow(1.0 - alpha_aff, 3);

        const Direction d = direction(sigma, jordan(aff.ds_t, aff.dz_t), aff.dtau * aff.dkappa);
        const double alpha = std::min(1.0, 0.99 * step_bound(d));
        if (opt.trace) std::fprintf(stderr, "    alpha_aff %.3e sigma %.3e alpha %.3e\n", alpha_aff, sigma, alpha);
        if (!(alpha > 1e-12)) return fail_or_best("step length vanished");

        x += alpha * d.dx;
        if (ne) y += alpha * d.dy;
        tau += alpha * d.dtau;
        kappa += alpha * d.dkappa;
        const RealMatrix st = sym(RealMatrix(lam + alpha * d.ds_t));
        const RealMatrix zt = sym(RealMatrix(lam + alpha * d.dz_t));
        if (!update_scaling(w, st, zt)) return fail_or_best("scaling update failed");
        s = w.r * w.lambda.asDiagonal() * w.r.transpose();
        z = w.rinv.transpose() * w.lambda.asDiagonal() * w.rinv;
    }
}

}  // namespace qbounds
