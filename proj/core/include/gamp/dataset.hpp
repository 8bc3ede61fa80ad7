#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace gamp {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Index = Eigen::Index;

// Feature matrix X (M x N) stored dense or compressed-sparse-row, with |X|^2
// cached for the GAMP variance products. Immutable after construction.
class FeatureMatrix {
 public:
  // Above this fill fraction, from_triplets() stores X dense.
  static constexpr double kDenseThreshold = 0.25;

  FeatureMatrix() : FeatureMatrix(DenseMatrix(0, 0)) {}
  explicit FeatureMatrix(DenseMatrix x);
  explicit FeatureMatrix(SparseMatrix x);

  static FeatureMatrix from_triplets(Index rows, Index cols,
                                     const std::vector<Eigen::Triplet<double>>& triplets);

  Index rows() const;
  Index cols() const;
  Index nonzeros() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(x_); }
  double density() const;

  // X w
  Vector multiply(const Vector& w) const;
  // X^T s
  Vector multiply_transpose(const Vector& s) const;
  // |X|^2 v (elementwise square of X)
  Vector multiply_squared(const Vector& v) const;
  // (|X|^2)^T u
  Vector multiply_squared_transpose(const Vector& u) const;

  // Replace |X|^2 products by the scalar mean-square approximation mean(|X|^2) * 1 1^T.
  // Off by default; trades accuracy for memory on very large inputs.
  FeatureMatrix with_scalar_variance() const;
  bool uses_scalar_variance() const { return scalar_variance_; }

  FeatureMatrix select_rows(std::span<const Index> rows) const;
  FeatureMatrix select_cols(std::span<const Index> cols) const;
  // Row m as a dense vector.
  Vector row(Index m) const;
  double coeff(Index m, Index n) const;

  DenseMatrix to_dense() const;
  const std::variant<DenseMatrix, SparseMatrix>& storage() const { return x_; }

 private:
  std::variant<DenseMatrix, SparseMatrix> x_;
  std::variant<DenseMatrix, SparseMatrix> x2_;
  bool scalar_variance_ = false;
  double mean_square_ = 0.0;
};

// Training or test pair (X, y) with y in {-1, +1}^M.
struct Dataset {
  FeatureMatrix X;
  Vector y;

  Index num_examples() const { return X.rows(); }
  Index num_features() const { return X.cols(); }

  // Throws DomainError when labels are not +-1, X has non-finite entries, or shapes disagree.
  void validate() const;
  Dataset subset(std::span<const Index> rows) const;
};

}  // namespace gamp
