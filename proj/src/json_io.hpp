#pragma once

#include <string>

#include <json.hpp>

#include "qbounds/errors.hpp"
#include "qbounds/linalg.hpp"

namespace qbounds::detail {

/// [[[re, im], ...], ...] row-major; throws ParseError.
inline ComplexMatrix complex_matrix_from_json(const nlohmann::json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw Error(ErrorKind::ParseError, name + ": expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw Error(ErrorKind::ParseError, name + ": ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& e = row[c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw Error(ErrorKind::ParseError, name + ": entries must be [re, im] pairs");
            m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}


/// [[x, ...], ...] row-major; throws ParseError.
inline RealMatrix real_matrix_from_json(const nlohmann::json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw Error(ErrorKind::ParseError, name + ": expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
    RealMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw Error(ErrorKind::ParseError, name + ": ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!row[c].is_number()) throw Error(ErrorKind::ParseError, name + ": entries must be numbers");
            m(r, c) = row[c].get<double>();
        }
    }
    return m;
}

}  // namespace qbounds::detail
