#pragma once

#include <ostream>

#include "qbounds/linalg.hpp"

namespace qbounds {

/// JSON number with 17 significant digits; non-finite values become null.
void write_json_number(std::ostream& os, double x);
void write_json_vector(std::ostream& os, const RealVector& v);
void write_json_matrix(std::ostream& os, const RealMatrix& m);
/// Row-major [[[re, im], ...], ...].
void write_json_complex_matrix(std::ostream& os, const ComplexMatrix& m);

}  // namespace qbounds
