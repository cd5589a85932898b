#pragma once

#include <algorithm>
#include <vector>

#include "qbounds/conic.hpp"

namespace qbounds::detail {

/// Evaluates D C_x D^T and (Tr[D C_i D^T Z])_i for a shared dictionary D.
/// When every coefficient entry touches a small "hub" set of dictionary
/// columns (the HCRB programs do), C_x = E U + U^T E^T - E U_H E^T with U
/// the hub rows, and both maps cost O(m q h) instead of O(m q^2).
class DictionaryMap {
public:
    DictionaryMap(const std::vector<std::vector<SymEntry>>& coeffs, int q) : coeffs_(coeffs), q_(q), pos_(q, -1) {
        for (const auto& c : coeffs)
            for (const auto& e : c) pos_[std::min(e.row, e.col)] = 0;
        for (int j = 0; j < q; ++j)
            if (pos_[j] == 0) {
                pos_[j] = static_cast<int>(hub_.size());
                hub_.push_back(j);
            }
        sparse_ = 4 * hub_.size() <= static_cast<std::size_t>(q);
    }

    RealMatrix apply(const RealMatrix& d, const RealVector& x) const {
        if (!sparse_) {
            RealMatrix cx = RealMatrix::Zero(q_, q_);
            for (std::size_t i = 0; i < coeffs_.size(); ++i) {
                if (x(i) == 0.0) continue;
                for (const auto& e : coeffs_[i]) cx(e.row, e.col) += x(i) * e.value;
            }
            return d * cx * d.transpose();
        }
        const int h = static_cast<int>(hub_.size());
        RealMatrix u = RealMatrix::Zero(h, q_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (x(i) == 0.0) continue;
            for (const auto& e : coeffs_[i])
                if (pos_[e.row] >= 0) u(pos_[e.row], e.col) += x(i) * e.value;
        }
        RealMatrix dh(d.rows(), h), uh(h, h);
        for (int a = 0; a < h; ++a) {
            dh.col(a) = d.col(hub_[a]);
            for (int b = 0; b < h; ++b) uh(a, b) = u(a, hub_[b]);
        }
        const RealMatrix qm = d * u.transpose();
        RealMatrix out = dh * qm.transpose();
        out += qm * dh.transpose();
        out -= dh * uh * dh.transpose();
        return out;
    }

    RealVector adjoint(const RealMatrix& d, const RealMatrix& z) const {
        RealVector out(coeffs_.size());
        if (!sparse_) {
            const RealMatrix zh = d.transpose() * z * d;
            for (std::size_t i = 0; i < coeffs_.size(); ++i) {
                double t = 0.0;
                for (const auto& e : coeffs_[i]) t += e.value * zh(e.col, e.row);
                out(i) = t;
            }
            return out;
        }
        const int h = static_cast<int>(hub_.size());
        RealMatrix dh(d.rows(), h);
        for (int a = 0; a < h; ++a) dh.col(a) = d.col(hub_[a]);
        const RealMatrix zh = (dh.transpose() * z) * d;  // hub rows of D^T Z D
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            double t = 0.0;
            for (const auto& e : coeffs_[i])
                t += e.value * (pos_[e.col] >= 0 ? zh(pos_[e.col], e.row) : zh(pos_[e.row], e.col));
            out(i) = t;
        }
        return out;
    }

private:
    const std::vector<std::vector<SymEntry>>& coeffs_;
    int q_;
    std::vector<int> pos_;
    std::vector<int> hub_;
    bool sparse_ = false;
};

}  // namespace qbounds::detail
