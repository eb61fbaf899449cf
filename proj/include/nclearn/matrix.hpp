#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace nclearn {

/// Dense row-major matrix. Sized for this problem domain: class counts up to
/// a few dozen, feature dimensions up to ~1000. No BLAS, no sparsity.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  /// All-ones matrix.
  static Matrix ones(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ > 0 && rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& v);
Matrix transpose(const Matrix& a);

/// Inverse by Gauss-Jordan elimination with partial pivoting. Throws
/// SingularMatrix when the best available pivot falls below 1e-12.
Matrix invert(const Matrix& m);

/// Induced (operator) 1-norm: max over columns of the column abs-sum.
double induced_one_norm(const Matrix& m);

/// Entrywise norms, the matrix analogue of the vector p-norm.
double vec_norm_1(const Matrix& m);
double vec_norm_inf(const Matrix& m);

/// Frobenius inner product <A, B> = sum_ij A_ij * B_ij.
double inner(const Matrix& a, const Matrix& b);

/// Headerless CSV: one row per line, comma-separated decimal entries.
void write_matrix_csv(const Matrix& m, const std::string& path);
Matrix read_matrix_csv(const std::string& path);

/// Confusion matrix C[i][j]: probability mass of (true class i, predicted
/// class j). Feasible confusions have entries in [0, 1] and total mass 1;
/// noise-corrected confusions (T^-1 C) may carry small negative entries but
/// keep total mass 1.
using ConfusionMatrix = Matrix;

}  // namespace nclearn
