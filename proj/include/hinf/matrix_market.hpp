#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hinf/system.hpp"

namespace hinf {

/// Matrix Market exchange format. Reads coordinate (to triplets) and array
/// (to dense) layouts with real, complex, integer or pattern fields and
/// general, symmetric, hermitian or skew-symmetric symmetry. Throws
/// Error{ParseError}.
RawMatrix read_matrix_market(std::istream& in, const std::string& label = "<stream>");
RawMatrix read_matrix_market(const std::filesystem::path& path);

/// Array layout, general symmetry. The field is real when every imaginary
/// part is zero, else complex. Values use 17 significant digits, so a
/// write/read cycle is exact.
void write_matrix_market(std::ostream& out, const Matrix& m);
void write_matrix_market(const std::filesystem::path& path, const Matrix& m);

/// Coordinate layout, general symmetry.
void write_matrix_market(std::ostream& out, const SparseMatrix& m);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);

}  // namespace hinf
