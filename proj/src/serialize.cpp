#include "qbounds/serialize.hpp"

#include <cmath>
#include <iomanip>

namespace qbounds {

void write_json_number(std::ostream& os, double x) {
    if (!std::isfinite(x)) {
        os << "null";
        return;
    }
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setprecision(17) << std::defaultfloat << x;
    os.flags(flags);
    os.precision(prec);
}

void write_json_vector(std::ostream& os, const RealVector& v) {
    os << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        write_json_number(os, v(i));
    }
    os << ']';
}

void write_json_matrix(std::ostream& os, const RealMatrix& m) {
    os << '[';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r) os << ", ";
        write_json_vector(os, m.row(r).transpose());
    }
    os << ']';
}

void write_json_complex_matrix(std::ostream& os, const ComplexMatrix& m) {
    os << '[';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r) os << ", ";
        os << '[';
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ", ";
            os << '[';
            write_json_number(os, m(r, c).real());
            os << ", ";
            write_json_number(os, m(r, c).imag());
            os << ']';
        }
        os << ']';
    }
    os << ']';
}

}  // namespace qbounds
