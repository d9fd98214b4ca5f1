#include "sap/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace sap {

Matrix load_matrix(std::istream& in) {
  long long rows = 0, cols = 0;
  if (!(in >> rows >> cols)) throw ValidationError("matrix loader: missing 'rows cols' header");
  if (rows < 1 || cols < 1) throw ValidationError("matrix loader: rows and cols must be >= 1");
  Matrix m(rows, cols);
  for (long long i = 0; i < rows; ++i)
    for (long long j = 0; j < cols; ++j)
      if (!(in >> m(i, j))) throw ValidationError("matrix loader: truncated entry list");
  if (!is_finite(m)) throw ValidationError("matrix loader: non-finite entry");
  return m;
}

Matrix load_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("matrix loader: cannot open " + path);
  return load_matrix(f);
}

Vector load_vector(std::istream& in) {
  long long n = 0;
  if (!(in >> n)) throw ValidationError("vector loader: missing length header");
  if (n < 1) throw ValidationError("vector loader: length must be >= 1");
  Vector v(n);
  for (long long i = 0; i < n; ++i)
    if (!(in >> v(i))) throw ValidationError("vector loader: truncated entry list");
  if (!is_finite(v)) throw ValidationError("vector loader: non-finite entry");
  return v;
}

Vector load_vector_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("vector loader: cannot open " + path);
  return load_vector(f);
}

void save_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << m(i, j) << (j + 1 < m.cols() ? ' ' : '\n');
  }
}

void save_vector(std::ostream& out, const Vector& v) {
  out << v.size() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v(i) << '\n';
}

}  // namespace sap
