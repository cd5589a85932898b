#include "qbounds/info_geometry.hpp"

#include <cmath>
#include <sstream>

#include "qbounds/errors.hpp"

namespace qbounds {

namespace {

constexpr double kSingularTol = 1e-10;

void check_weight(const RealMatrix& w, int n) {
    if (w.rows() != n || w.cols() != n) throw Error(ErrorKind::DimensionMismatch, "weight matrix must be n x n");
}

std::string sci(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

}  // namespace

SldSet compute_slds(const QuantumModel& model, const SpectralData& spectral) {
    const int d = model.dim();
    const int n = model.n_params();
    const int r = spectral.rank;
    const RealVector p = spectral.clamped();

    std::vector<ComplexMatrix> le(n);
    for (int i = 0; i < n; ++i) {
        const ComplexMatrix de = spectral.to_eigenbasis(model.drho[i]);
        if (r < d) {
            const double kk = max_abs(de.bottomRightCorner(d - r, d - r));
            if (kk > 1e-8)
                throw Error(ErrorKind::DerivativeOutsideModel,
                            "kernel block of drho[" + std::to_string(i) + "] is " + sci(kk) + " (rank is changing)");
        }
        le[i] = ComplexMatrix::Zero(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const double s = p(a) + p(b);
                if (s > spectral.rank_tol && (a < r || b < r)) le[i](a, b) = 2.0 * de(a, b) / s;
            }
        le[i] = hermitian_part(le[i]);
    }

    SldSet out;
    out.J.resize(n, n);
    out.D.resize(n, n);
    const ComplexVector pc = p.cast<Complex>();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // Tr[rho L_i L_j] in the eigenbasis: sum_a p_a (L_i L_j)_aa
            Complex t = 0.0;
            for (int a = 0; a < r; ++a) t += pc(a) * le[i].row(a).transpose().cwiseProduct(le[j].col(a)).sum();
            out.J(i, j) = t.real();
            // Tr[L_j L_i rho] = conj(Tr[rho L_i L_j]) for Hermitian operators
            out.D(i, j) = -t.imag();
        }
    }
    out.J = 0.5 * (out.J + out.J.transpose());
    out.D = 0.5 * (out.D - out.D.transpose());
    out.L.reserve(n);
    for (int i = 0; i < n; ++i) out.L.push_back(spectral.from_eigenbasis(le[i]));
    return out;
}

SldSet compute_slds(const QuantumModel& model) { return compute_slds(model, eigendecompose(model.rho)); }

bool is_singular_qfim(const RealMatrix& j) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(j, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    return !(lmax > 0.0) || es.eigenvalues().minCoeff() <= kSingularTol * lmax;
}

double sld_bound(const SldSet& slds, const RealMatrix& weight) {
    check_weight(weight, static_cast<int>(slds.J.rows()));
    if (is_singular_qfim(slds.J)) throw Error(ErrorKind::SingularModel, "quantum Fisher information is singular");
    return (weight * slds.J.ldlt().solve(RealMatrix::Identity(slds.J.rows(), slds.J.cols()))).trace();
}

RldSet compute_rlds(const QuantumModel& model, const SpectralData& spectral, double leak_tol) {
    const int d = model.dim();
    const int n = model.n_params();
    const int r = spectral.rank;
    const RealVector p = spectral.clamped();

    std::vector<ComplexMatrix> de(n);
    for (int i = 0; i < n; ++i) de[i] = spectral.to_eigenbasis(model.drho[i]);

    RldSet out;
    out.J.resize(n, n);
    out.leakage.resize(n, n);
    out.max_leakage = 0.0;
    for (int i = 0; i < n; ++i)
        if (r < d) out.max_leakage = std::max(out.max_leakage, max_abs(de[i].bottomRows(d - r)));
    out.exists = out.max_leakage <= leak_tol;

    RealVector pinv = RealVector::Zero(d);
    for (int a = 0; a < r; ++a) pinv(a) = 1.0 / p(a);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // Tr[A diag(w) B] = sum_ab A_ab w_b B_ba
            Complex js = 0.0, jk = 0.0;
            for (int b = 0; b < d; ++b) {
                const Complex t = de[i].col(b).cwiseProduct(de[j].row(b).transpose()).sum();
                if (b < r)
                    js += pinv(b) * t;
                else
                    jk += t;
            }
            out.J(i, j) = js;
            out.leakage(i, j) = jk;
        }
    out.J = hermitian_part(out.J);
    out.leakage = hermitian_part(out.leakage);

    out.L.reserve(n);
    for (int i = 0; i < n; ++i) {
        ComplexMatrix l = pinv.cast<Complex>().asDiagonal() * de[i];
        out.L.push_back(spectral.from_eigenbasis(l));
    }
    return out;
}

RldSet compute_rlds(const QuantumModel& model) { return compute_rlds(model, eigendecompose(model.rho)); }

double rld_bound_from_inverse(const ComplexMatrix& j_inv, const RealMatrix& weight) {
    check_weight(weight, static_cast<int>(j_inv.rows()));
    const RealMatrix sw = symmetric_sqrt(weight);
    const RealMatrix re = 0.5 * (j_inv.real() + j_inv.real().transpose());
    const RealMatrix im = 0.5 * (j_inv.imag() - j_inv.imag().transpose());
    return (weight * re).trace() + trace_norm(sw * im * sw);
}

double rld_bound(const RldSet& rlds, const RealMatrix& weight) {
    if (!rlds.exists)
        throw Error(ErrorKind::RldUnsupported,
                    "derivatives leave the support of rho (leakage " + sci(rlds.max_leakage) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rlds.J);
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmax > 0.0) || es.eigenvalues().minCoeff() <= kSingularTol * lmax)
        throw Error(ErrorKind::SingularModel, "RLD Fisher information is singular");
    const RealVector inv = es.eigenvalues().cwiseInverse();
    const ComplexMatrix j_inv = es.eigenvectors() * inv.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    return rld_bound_from_inverse(j_inv, weight);
}

double rld_limit_bound(const RldSet& rlds, const RealMatrix& weight) {
    if (rlds.exists) return rld_bound(rlds, weight);
    const Eigen::Index n = rlds.J.rows();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ek(rlds.leakage);
    const double kmax = std::max(ek.eigenvalues().maxCoeff(), 0.0);
    std::vector<Eigen::Index> null;
    for (Eigen::Index k = 0; k < n; ++k)
        if (ek.eigenvalues()(k) <= 1e-10 * kmax) null.push_back(k);
    if (null.empty()) return 0.0;
    ComplexMatrix nb(n, static_cast<Eigen::Index>(null.size()));
    for (std::size_t c = 0; c < null.size(); ++c) nb.col(c) = ek.eigenvectors().col(null[c]);
    const ComplexMatrix reduced = hermitian_part(nb.adjoint() * rlds.J * nb);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> er(reduced);
    const double rmax = er.eigenvalues().maxCoeff();
    if (!(rmax > 0.0) || er.eigenvalues().minCoeff() <= kSingularTol * rmax)
        throw Error(ErrorKind::SingularModel, "RLD Fisher information is singular on the non-leaking directions");
    const ComplexMatrix rinv = er.eigenvectors() * er.eigenvalues().cwiseInverse().cast<Complex>().asDiagonal() *
                               er.eigenvectors().adjoint();
    return rld_bound_from_inverse(nb * rinv * nb.adjoint(), weight);
}

WeakCommutativity weak_commutativity(const SldSet& slds) { return {slds.D, slds.D.norm()}; }

void check_povm(const Povm& povm, int dim) {
    if (povm.elements.empty()) throw Error(ErrorKind::InvalidArgument, "POVM has no elements");
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (const auto& e : povm.elements) {
        if (e.rows() != dim || e.cols() != dim) throw Error(ErrorKind::DimensionMismatch, "POVM element dimension");
        if (!is_hermitian(e, 1e-10)) throw Error(ErrorKind::InvalidArgument, "POVM element is not Hermitian");
        if (min_eigenvalue(hermitian_part(e)) < -1e-10)
            throw Error(ErrorKind::InvalidArgument, "POVM element is not positive");
        sum += e;
    }
    const double err = max_abs(sum - ComplexMatrix::Identity(dim, dim));
    if (err > 1e-9) throw Error(ErrorKind::InvalidArgument, "POVM elements do not sum to identity (" + sci(err) + ")");
}

RealMatrix classical_fim(const QuantumModel& model, const Povm& povm, double p_floor) {
    check_povm(povm, model.dim());
    const int n = model.n_params();
    RealMatrix f = RealMatrix::Zero(n, n);
    RealVector g(n);
    for (std::size_t w = 0; w < povm.elements.size(); ++w) {
        const ComplexMatrix& e = povm.elements[w];
        const double p = trace_product(model.rho, e).real();
        for (int i = 0; i < n; ++i) g(i) = trace_product(model.drho[i], e).real();
        if (p <= p_floor) {
            if (g.cwiseAbs().maxCoeff() <= std::sqrt(p_floor)) continue;
            throw Error(ErrorKind::IllConditionedOutcome, "outcome " + std::to_string(w) + " has probability " +
                                                              sci(p) + " but gradient " + sci(g.cwiseAbs().maxCoeff()));
        }
        f += g * g.transpose() / p;
    }
    return f;
}

Povm sld_eigenbasis_povm(const SldSet& slds, int which, const ComplexMatrix& rho) {
    if (which < 0 || which >= static_cast<int>(slds.L.size()))
        throw Error(ErrorKind::InvalidArgument, "parameter index out of range");
    const ComplexMatrix& l = slds.L[which];
    const Eigen::Index d = l.rows();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(l));
    const RealVector& ev = es.eigenvalues();
    ComplexMatrix vecs = es.eigenvectors();
    const double tol = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());

    Eigen::Index start = 0;
    while (start < d) {
        Eigen::Index stop = start + 1;
        while (stop < d && ev(stop) - ev(stop - 1) <= tol) ++stop;
        const Eigen::Index m = stop - start;
        if (m > 1) {
            const ComplexMatrix block = vecs.middleCols(start, m);
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> er(hermitian_part(block.adjoint() * rho * block));
            vecs.middleCols(start, m) = block * er.eigenvectors();
        }
        start = stop;
    }

    Povm povm;
    povm.elements.reserve(d);
    for (Eigen::Index k = 0; k < d; ++k) povm.elements.push_back(vecs.col(k) * vecs.col(k).adjoint());
    return povm;
}

}  // namespace qbounds
