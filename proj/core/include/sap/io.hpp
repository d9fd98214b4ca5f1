#ifndef SAP_IO_HPP
#define SAP_IO_HPP

#include <iosfwd>
#include <string>

#include "sap/linalg.hpp"

namespace sap {

// Whitespace-separated text. First line "rows cols", then row-major entries.
Matrix load_matrix(std::istream& in);
Matrix load_matrix_file(const std::string& path);

// First line "n", then n entries.
Vector load_vector(std::istream& in);
Vector load_vector_file(const std::string& path);

void save_matrix(std::ostream& out, const Matrix& m);
void save_vector(std::ostream& out, const Vector& v);

}  // namespace sap

#endif
