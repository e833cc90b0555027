#include "hinf/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hinf/error.hpp"

namespace hinf {

namespace {

enum class Layout { Coordinate, Array };
enum class Field { Real, Complex, Integer, Pattern };
enum class Symmetry { General, Symmetric, Hermitian, Skew };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail(const std::string& label, const std::string& msg) {
  throw Error(ErrorCode::ParseError, label + ": " + msg);
}

struct Header {
  Layout layout = Layout::Coordinate;
  Field field = Field::Real;
  Symmetry symmetry = Symmetry::General;
};

Header parse_header(const std::string& line, const std::string& label) {
  std::istringstream ss(line);
  std::string banner, object, layout, field, symmetry;
  ss >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail(label, "missing %%MatrixMarket banner");
  if (lower(object) != "matrix") fail(label, "only 'matrix' objects are supported");

  Header h;
  layout = lower(layout);
  if (layout == "coordinate") {
    h.layout = Layout::Coordinate;
  } else if (layout == "array") {
    h.layout = Layout::Array;
  } else {
    fail(label, "unknown layout '" + layout + "'");
  }
  field = lower(field);
  if (field == "real" || field == "double") {
    h.field = Field::Real;
  } else if (field == "complex") {
    h.field = Field::Complex;
  } else if (field == "integer") {
    h.field = Field::Integer;
  } else if (field == "pattern") {
    h.field = Field::Pattern;
  } else {
    fail(label, "unknown field '" + field + "'");
  }
  symmetry = lower(symmetry);
  if (symmetry == "general") {
    h.symmetry = Symmetry::General;
  } else if (symmetry == "symmetric") {
    h.symmetry = Symmetry::Symmetric;
  } else if (symmetry == "hermitian") {
    h.symmetry = Symmetry::Hermitian;
  } else if (symmetry == "skew-symmetric") {
    h.symmetry = Symmetry::Skew;
  } else {
    fail(label, "unknown symmetry '" + symmetry + "'");
  }
  if (h.layout == Layout::Array && h.field == Field::Pattern) {
    fail(label, "pattern field requires coordinate layout");
  }
  return h;
}

/// Next line that is neither blank nor a comment.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') continue;
    return true;
  }
  return false;
}

cd read_value(std::istringstream& ss, Field field, const std::string& label) {
  double re = 0.0, im = 0.0;
  switch (field) {
    case Field::Pattern:
      return cd(1.0, 0.0);
    case Field::Complex:
      if (!(ss >> re >> im)) fail(label, "expected a complex entry");
      return cd(re, im);
    case Field::Real:
    case Field::Integer:
      if (!(ss >> re)) fail(label, "expected a numeric entry");
      return cd(re, 0.0);
  }
  return cd();
}

cd mirrored(cd v, Symmetry s) {
  switch (s) {
    case Symmetry::Hermitian: return std::conj(v);
    case Symmetry::Skew: return -v;
    default: return v;
  }
}

}  // namespace

RawMatrix read_matrix_market(std::istream& in, const std::string& label) {
  std::string line;
  if (!std::getline(in, line)) fail(label, "empty file");
  const Header h = parse_header(line, label);

  if (!next_data_line(in, line)) fail(label, "missing size line");
  std::istringstream size_line(line);
  long rows = -1, cols = -1, nnz = -1;
  if (h.layout == Layout::Coordinate) {
    if (!(size_line >> rows >> cols >> nnz)) fail(label, "malformed size line");
  } else {
    if (!(size_line >> rows >> cols)) fail(label, "malformed size line");
  }
  if (rows < 0 || cols < 0 || (h.layout == Layout::Coordinate && nnz < 0)) {
    fail(label, "negative dimensions");
  }
  if (h.symmetry != Symmetry::General && rows != cols) {
    fail(label, "symmetric storage requires a square matrix");
  }

  if (h.layout == Layout::Coordinate) {
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(nnz) * (h.symmetry == Symmetry::General ? 1 : 2));
    for (long k = 0; k < nnz; ++k) {
      if (!next_data_line(in, line)) fail(label, "fewer entries than declared");
      std::istringstream ss(line);
      long i = 0, j = 0;
      if (!(ss >> i >> j)) fail(label, "malformed entry indices");
      if (i < 1 || i > rows || j < 1 || j > cols) fail(label, "entry index out of range");
      const cd v = read_value(ss, h.field, label);
      trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
      if (h.symmetry != Symmetry::General && i != j) {
        trips.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1),
                           mirrored(v, h.symmetry));
      }
    }
    return RawMatrix::from_triplets(static_cast<int>(rows), static_cast<int>(cols),
                                    std::move(trips));
  }

  Matrix m = Matrix::Zero(rows, cols);
  // Column-major; symmetric variants list only the lower triangle (strictly
  // lower for skew-symmetric).
  for (long j = 0; j < cols; ++j) {
    long start = 0;
    if (h.symmetry == Symmetry::Symmetric || h.symmetry == Symmetry::Hermitian) start = j;
    if (h.symmetry == Symmetry::Skew) start = j + 1;
    for (long i = start; i < rows; ++i) {
      if (!next_data_line(in, line)) fail(label, "fewer entries than declared");
      std::istringstream ss(line);
      const cd v = read_value(ss, h.field, label);
      m(i, j) = v;
      if (h.symmetry != Symmetry::General && i != j) m(j, i) = mirrored(v, h.symmetry);
    }
  }
  return RawMatrix::from_dense(std::move(m));
}

RawMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path.string(), "cannot open file");
  return read_matrix_market(in, path.string());
}

namespace {

void write_value(std::ostream& out, cd v, bool complex) {
  out << v.real();
  if (complex) out << ' ' << v.imag();
  out << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, path.string() + ": cannot open for writing");
  return out;
}

}  // namespace

void write_matrix_market(std::ostream& out, const Matrix& m) {
  const bool complex = m.size() > 0 && m.imag().cwiseAbs().maxCoeff() != 0.0;
  out << "%%MatrixMarket matrix array " << (complex ? "complex" : "real") << " general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) write_value(out, m(i, j), complex);
  }
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_output(path);
  write_matrix_market(out, m);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  bool complex = false;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) complex |= it.value().imag() != 0.0;
  }
  out << "%%MatrixMarket matrix coordinate " << (complex ? "complex" : "real") << " general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ';
      write_value(out, it.value(), complex);
    }
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m) {
  auto out = open_output(path);
  write_matrix_market(out, m);
}

}  // namespace hinf
