#include "symetric/errors.hpp"
#include "symetric/maplearn.hpp"

#include <map>
#include <string>

namespace symetric {

std::size_t polynomial_feature_count(int dim, int order) {
  if (dim < 1) throw Error(ErrorKind::InvalidDimension, "polynomial expansion needs at least one variable");
  if (order < 1) throw Error(ErrorKind::InvalidParameter, "polynomial order must be at least 1");
  // C(dim + order, order), accumulated exactly: after step i it equals C(dim + i, i).
  unsigned long long count = 1;
  for (int i = 1; i <= order; ++i) {
    count = count * static_cast<unsigned long long>(dim + i) / static_cast<unsigned long long>(i);
    if (count > kMaxPolynomialFeatures + 1) {
      throw Error(ErrorKind::ExpansionTooLarge, "order-" + std::to_string(order) + " expansion of " +
                                                    std::to_string(dim) + " variables exceeds " +
                                                    std::to_string(kMaxPolynomialFeatures) + " features");
    }
  }
  return static_cast<std::size_t>(count - 1);
}

PolynomialBasis::PolynomialBasis(int dim, int order) : dim_(dim), order_(order) {
  const std::size_t count = polynomial_feature_count(dim, order);
  exponents_.reserve(count);
  parent_.reserve(count);
  factor_.reserve(count);

  // Monomials as sorted index tuples i₁ ≤ … ≤ i_k; the parent drops the last index.
  std::map<std::vector<int>, std::ptrdiff_t> index;
  std::vector<std::vector<int>> previous;
  for (int d = 0; d < dim; ++d) previous.push_back({d});
  for (int degree = 1; degree <= order; ++degree) {
    std::vector<std::vector<int>> current;
    if (degree == 1) {
      current = previous;
    } else {
      for (const auto& tuple : previous) {
        for (int d = tuple.back(); d < dim; ++d) {
          auto next = tuple;
          next.push_back(d);
          current.push_back(std::move(next));
        }
      }
    }
    for (const auto& tuple : current) {
      std::vector<int> exps(static_cast<std::size_t>(dim), 0);
      for (int d : tuple) ++exps[static_cast<std::size_t>(d)];
      const auto j = static_cast<std::ptrdiff_t>(exponents_.size());
      if (degree == 1) {
        parent_.push_back(-1);
      } else {
        parent_.push_back(index.at(std::vector<int>(tuple.begin(), tuple.end() - 1)));
      }
      factor_.push_back(tuple.back());
      exponents_.push_back(std::move(exps));
      if (degree < order) index.emplace(tuple, j);
    }
    previous = std::move(current);
  }
}

Vector PolynomialBasis::features(const Vector& z) const {
  if (z.size() != dim_) throw Error(ErrorKind::InvalidDimension, "feature input has wrong dimension");
  Vector phi(static_cast<Eigen::Index>(size()));
  for (std::size_t j = 0; j < size(); ++j) {
    const double v = z[factor_[j]];
    phi[static_cast<Eigen::Index>(j)] = parent_[j] < 0 ? v : phi[parent_[j]] * v;
  }
  return phi;
}

Matrix PolynomialBasis::features(const Matrix& rows) const {
  if (rows.cols() != dim_) throw Error(ErrorKind::InvalidDimension, "feature input has wrong dimension");
  Matrix phi(rows.rows(), static_cast<Eigen::Index>(size()));
  for (std::size_t j = 0; j < size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    if (parent_[j] < 0) {
      phi.col(col) = rows.col(factor_[j]);
    } else {
      phi.col(col) = phi.col(parent_[j]).cwiseProduct(rows.col(factor_[j]));
    }
  }
  return phi;
}

Matrix PolynomialBasis::feature_jacobian(const Vector& z) const {
  if (z.size() != dim_) throw Error(ErrorKind::InvalidDimension, "feature input has wrong dimension");
  Matrix jac = Matrix::Zero(static_cast<Eigen::Index>(size()), dim_);
  for (std::size_t j = 0; j < size(); ++j) {
    const auto& e = exponents_[j];
    for (int d = 0; d < dim_; ++d) {
      if (e[static_cast<std::size_t>(d)] == 0) continue;
      double term = e[static_cast<std::size_t>(d)];
      for (int v = 0; v < dim_; ++v) {
        const int power = e[static_cast<std::size_t>(v)] - (v == d ? 1 : 0);
        for (int r = 0; r < power; ++r) term *= z[v];
      }
      jac(static_cast<Eigen::Index>(j), d) = term;
    }
  }
  return jac;
}

Vector polynomial_features(const Vector& v, int order) {
  return PolynomialBasis(static_cast<int>(v.size()), order).features(v);
}

}  // namespace symetric
