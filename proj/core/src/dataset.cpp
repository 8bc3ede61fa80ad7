#include "gamp/dataset.hpp"

#include <cmath>
#include <utility>

#include "gamp/errors.hpp"

namespace gamp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

FeatureMatrix::FeatureMatrix(DenseMatrix x) : x_(std::move(x)) {
  x2_ = DenseMatrix(std::get<DenseMatrix>(x_).array().square().matrix());
}

FeatureMatrix::FeatureMatrix(SparseMatrix x) : x_(std::move(x)) {
  auto& sp = std::get<SparseMatrix>(x_);
  sp.makeCompressed();
  SparseMatrix sq = sp;
  for (Index k = 0; k < sq.nonZeros(); ++k) sq.valuePtr()[k] *= sq.valuePtr()[k];
  x2_ = std::move(sq);
}

FeatureMatrix FeatureMatrix::from_triplets(Index rows, Index cols,
                                           const std::vector<Eigen::Triplet<double>>& triplets) {
  const double cells = static_cast<double>(rows) * static_cast<double>(cols);
  const double fill = cells > 0 ? static_cast<double>(triplets.size()) / cells : 0.0;
  SparseMatrix sp(rows, cols);
  sp.setFromTriplets(triplets.begin(), triplets.end());
  if (fill > kDenseThreshold) return FeatureMatrix(DenseMatrix(sp));
  return FeatureMatrix(std::move(sp));
}

Index FeatureMatrix::rows() const {
  return std::visit([](const auto& m) { return static_cast<Index>(m.rows()); }, x_);
}

Index FeatureMatrix::cols() const {
  return std::visit([](const auto& m) { return static_cast<Index>(m.cols()); }, x_);
}

Index FeatureMatrix::nonzeros() const {
  return std::visit(Overloaded{[](const DenseMatrix& m) { return static_cast<Index>((m.array() != 0.0).count()); },
                               [](const SparseMatrix& m) { return static_cast<Index>(m.nonZeros()); }},
                    x_);
}

double FeatureMatrix::density() const {
  const double cells = static_cast<double>(rows()) * static_cast<double>(cols());
  return cells > 0 ? static_cast<double>(nonzeros()) / cells : 0.0;
}

Vector FeatureMatrix::multiply(const Vector& w) const {
  return std::visit([&](const auto& m) -> Vector { return m * w; }, x_);
}

Vector FeatureMatrix::multiply_transpose(const Vector& s) const {
  return std::visit([&](const auto& m) -> Vector { return m.transpose() * s; }, x_);
}

Vector FeatureMatrix::multiply_squared(const Vector& v) const {
  if (scalar_variance_) return Vector::Constant(rows(), mean_square_ * v.sum());
  return std::visit([&](const auto& m) -> Vector { return m * v; }, x2_);
}

Vector FeatureMatrix::multiply_squared_transpose(const Vector& u) const {
  if (scalar_variance_) return Vector::Constant(cols(), mean_square_ * u.sum());
  return std::visit([&](const auto& m) -> Vector { return m.transpose() * u; }, x2_);
}

FeatureMatrix FeatureMatrix::with_scalar_variance() const {
  FeatureMatrix out = *this;
  const double cells = static_cast<double>(rows()) * static_cast<double>(cols());
  const double total = std::visit([](const auto& m) { return m.sum(); }, x2_);
  out.mean_square_ = cells > 0 ? total / cells : 0.0;
  out.scalar_variance_ = true;
  out.x2_ = DenseMatrix(0, 0);
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const Index> idx) const {
  return std::visit(
      Overloaded{[&](const DenseMatrix& m) {
                   DenseMatrix out(static_cast<Index>(idx.size()), m.cols());
                   for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(idx[i]);
                   return FeatureMatrix(std::move(out));
                 },
                 [&](const SparseMatrix& m) {
                   std::vector<Eigen::Triplet<double>> trip;
                   for (std::size_t i = 0; i < idx.size(); ++i)
                     for (SparseMatrix::InnerIterator it(m, idx[i]); it; ++it)
                       trip.emplace_back(static_cast<Index>(i), it.col(), it.value());
                   SparseMatrix out(static_cast<Index>(idx.size()), m.cols());
                   out.setFromTriplets(trip.begin(), trip.end());
                   return FeatureMatrix(std::move(out));
                 }},
      x_);
}

FeatureMatrix FeatureMatrix::select_cols(std::span<const Index> idx) const {
  return std::visit(
      Overloaded{[&](const DenseMatrix& m) {
                   DenseMatrix out(m.rows(), static_cast<Index>(idx.size()));
                   for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = m.col(idx[j]);
                   return FeatureMatrix(std::move(out));
                 },
                 [&](const SparseMatrix& m) {
                   std::vector<Index> where(static_cast<std::size_t>(m.cols()), -1);
                   for (std::size_t j = 0; j < idx.size(); ++j) where[static_cast<std::size_t>(idx[j])] = static_cast<Index>(j);
                   std::vector<Eigen::Triplet<double>> trip;
                   for (Index r = 0; r < m.outerSize(); ++r)
                     for (SparseMatrix::InnerIterator it(m, r); it; ++it)
                       if (const Index c = where[static_cast<std::size_t>(it.col())]; c >= 0)
                         trip.emplace_back(r, c, it.value());
                   SparseMatrix out(m.rows(), static_cast<Index>(idx.size()));
                   out.setFromTriplets(trip.begin(), trip.end());
                   return FeatureMatrix(std::move(out));
                 }},
      x_);
}

Vector FeatureMatrix::row(Index m) const {
  return std::visit(Overloaded{[&](const DenseMatrix& x) -> Vector { return x.row(m).transpose(); },
                               [&](const SparseMatrix& x) -> Vector {
                                 Vector out = Vector::Zero(x.cols());
                                 for (SparseMatrix::InnerIterator it(x, m); it; ++it) out(it.col()) = it.value();
                                 return out;
                               }},
                    x_);
}

double FeatureMatrix::coeff(Index m, Index n) const {
  return std::visit([&](const auto& x) { return x.coeff(m, n); }, x_);
}

DenseMatrix FeatureMatrix::to_dense() const {
  return std::visit(Overloaded{[](const DenseMatrix& x) { return x; },
                               [](const SparseMatrix& x) { return DenseMatrix(x); }},
                    x_);
}

void Dataset::validate() const {
  if (X.rows() != y.size())
    throw DomainError("dataset: X has " + std::to_string(X.rows()) + " rows but y has " +
                      std::to_string(y.size()) + " labels");
  for (Index m = 0; m < y.size(); ++m)
    if (y(m) != 1.0 && y(m) != -1.0)
      throw DomainError("dataset: label " + std::to_string(m) + " is not -1 or +1");
  const bool finite = std::visit(
      Overloaded{[](const DenseMatrix& x) { return x.allFinite(); },
                 [](const SparseMatrix& x) {
                   for (Index k = 0; k < x.nonZeros(); ++k)
                     if (!std::isfinite(x.valuePtr()[k])) return false;
                   return true;
                 }},
      X.storage());
  if (!finite) throw DomainError("dataset: X contains NaN or Inf");
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  Vector ys(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) ys(static_cast<Index>(i)) = y(rows[i]);
  return Dataset{X.select_rows(rows), std::move(ys)};
}

}  // namespace gamp
