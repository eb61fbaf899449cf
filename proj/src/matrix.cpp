#include "nclearn/matrix.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "nclearn/errors.hpp"

namespace nclearn {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch(std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double value)
    : rows_(rows), cols_(cols), data_(rows * cols, value) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeMismatch("Matrix initializer rows have uneven lengths");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error("Matrix entries must be finite");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator+");
  Matrix out = a;
  for (std::size_t k = 0; k < out.data().size(); ++k) out.data()[k] += b.data()[k];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator-");
  Matrix out = a;
  for (std::size_t k = 0; k < out.data().size(); ++k) out.data()[k] -= b.data()[k];
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeMismatch("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix out(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      double* orow = out.row_ptr(i);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& v) {
  if (a.cols() != v.size()) {
    throw ShapeMismatch("matvec: matrix has " + std::to_string(a.cols()) + " cols, vector size " +
                        std::to_string(v.size()));
  }
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* row = a.row_ptr(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix invert(const Matrix& m) {
  if (!m.square()) throw ShapeMismatch("invert: matrix must be square and nonempty");
  const std::size_t n = m.rows();
  Matrix a = m;
  Matrix inv = Matrix::identity(n);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double mag = std::abs(a(r, col));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (best < 1e-12) throw SingularMatrix("invert: pivot below 1e-12 at column " + std::to_string(col));
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(pivot, j), a(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const double d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

double induced_one_norm(const Matrix& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
    if (s > best) best = s;
  }
  return best;
}

double vec_norm_1(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += std::abs(v);
  return s;
}

double vec_norm_inf(const Matrix& m) {
  double best = 0.0;
  for (double v : m.data()) {
    const double mag = std::abs(v);
    if (mag > best) best = mag;
  }
  return best;
}

double inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "inner");
  double s = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) s += a.data()[k] * b.data()[k];
  return s;
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        if (!std::isfinite(v)) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ParseError(path + ": line " + std::to_string(lineno) + ": bad numeric cell '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path + ": line " + std::to_string(lineno) + ": uneven row length");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace nclearn
