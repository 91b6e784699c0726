#include "symetric/errors.hpp"
#include "symetric/log.hpp"
#include "symetric/maplearn.hpp"

#include <algorithm>
#include <cmath>

namespace symetric {

namespace {

double soft_threshold(double rho, double alpha) {
  if (rho > alpha) return rho - alpha;
  if (rho < -alpha) return rho + alpha;
  return 0.0;
}

double objective(const Matrix& gram, const Vector& xty, double yty, double alpha, const Vector& w) {
  return 0.5 * yty - w.dot(xty) + 0.5 * w.dot(gram * w) + alpha * w.lpNorm<1>();
}

// Fold index of every row: distinct group labels in order of first
// appearance, cut into `folds` contiguous runs of near-equal size.
std::vector<int> assign_folds(std::size_t rows, int folds, std::span<const std::size_t> groups) {
  std::vector<std::size_t> rank(rows);
  std::size_t distinct = 0;
  if (groups.empty()) {
    for (std::size_t i = 0; i < rows; ++i) rank[i] = i;
    distinct = rows;
  } else {
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < rows; ++i) {
      auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& s) { return s.first == groups[i]; });
      if (it == seen.end()) {
        seen.emplace_back(groups[i], distinct);
        rank[i] = distinct++;
      } else {
        rank[i] = it->second;
      }
    }
  }
  if (distinct < static_cast<std::size_t>(folds)) {
    throw Error(ErrorKind::InvalidParameter, "cross-validation needs at least " + std::to_string(folds) +
                                                 " groups, got " + std::to_string(distinct));
  }
  std::vector<int> fold(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    fold[i] = static_cast<int>(rank[i] * static_cast<std::size_t>(folds) / distinct);
  }
  return fold;
}

struct Problem {
  Matrix gram;
  Matrix xty;  // features × outputs
  Vector yty;
  Vector x_mean;
  Vector y_mean;
};

Problem centered_problem(const Matrix& x, const Matrix& y) {
  Problem p;
  const double n = static_cast<double>(x.rows());
  p.x_mean = x.colwise().mean();
  p.y_mean = y.colwise().mean();
  const Matrix xc = x.rowwise() - p.x_mean.transpose();
  const Matrix yc = y.rowwise() - p.y_mean.transpose();
  p.gram = (xc.transpose() * xc) / n;
  p.xty = (xc.transpose() * yc) / n;
  p.yty = yc.colwise().squaredNorm().transpose() / n;
  return p;
}

Matrix select_rows(const Matrix& m, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

}  // namespace

CoordinateDescentResult lasso_coordinate_descent(const Matrix& gram, const Vector& xty, double yty, double alpha,
                                                 int max_iter, double tol, const Vector* warm_start,
                                                 bool record_objective) {
  const Eigen::Index f = gram.rows();
  if (gram.cols() != f || xty.size() != f) throw Error(ErrorKind::InvalidDimension, "Gram system shape mismatch");
  if (alpha < 0.0) throw Error(ErrorKind::InvalidParameter, "Lasso alpha must be nonnegative");
  if (max_iter < 1) throw Error(ErrorKind::InvalidParameter, "Lasso max_iter must be at least 1");

  CoordinateDescentResult result;
  result.coef = warm_start ? *warm_start : Vector::Zero(f);
  if (result.coef.size() != f) throw Error(ErrorKind::InvalidDimension, "warm start has wrong length");
  Vector gw = gram * result.coef;

  for (int sweep = 0; sweep < max_iter; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < f; ++j) {
      const double gjj = gram(j, j);
      if (gjj <= 0.0) continue;
      const double old = result.coef[j];
      const double rho = xty[j] - gw[j] + gjj * old;
      const double updated = soft_threshold(rho, alpha) / gjj;
      const double delta = updated - old;
      if (delta != 0.0) {
        result.coef[j] = updated;
        gw.noalias() += delta * gram.col(j);
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    result.sweeps = sweep + 1;
    if (record_objective) result.objective.push_back(objective(gram, xty, yty, alpha, result.coef));
    if (max_change < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

LassoResult lasso_fit(const Matrix& x, const Matrix& y, const LassoOptions& options,
                      std::span<const std::size_t> groups) {
  const Eigen::Index n = x.rows();
  if (y.rows() != n) throw Error(ErrorKind::InvalidDimension, "Lasso X and Y row counts differ");
  if (n < 2) throw Error(ErrorKind::InvalidDimension, "Lasso needs at least two rows");
  if (x.cols() < 1 || y.cols() < 1) throw Error(ErrorKind::InvalidDimension, "Lasso needs features and targets");
  if (!groups.empty() && groups.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::InvalidDimension, "one group label per row required");
  }
  if (options.alphas.empty()) throw Error(ErrorKind::InvalidParameter, "empty alpha grid");
  if (options.folds < 2) throw Error(ErrorKind::InvalidParameter, "cross-validation needs at least 2 folds");

  LassoResult result;
  result.coef = Matrix::Zero(y.cols(), x.cols());

  // Standardize columns; zero-variance ones are dropped from the fit.
  const Vector mean = x.colwise().mean();
  std::vector<Eigen::Index> kept;
  std::vector<double> scale;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt((x.col(j).array() - mean[j]).square().mean());
    if (!(sd >= 1e-12)) {
      result.excluded_columns.push_back(static_cast<std::size_t>(j));
      continue;
    }
    kept.push_back(j);
    scale.push_back(sd);
  }
  if (!result.excluded_columns.empty()) {
    log::warn("lasso: {} zero-variance feature column(s) excluded", result.excluded_columns.size());
  }

  const Vector y_mean = y.colwise().mean();
  result.intercept = y_mean;
  result.alpha.assign(static_cast<std::size_t>(y.cols()), options.alphas.front());
  if (kept.empty()) return result;

  const auto f = static_cast<Eigen::Index>(kept.size());
  Matrix xs(n, f);
  for (Eigen::Index j = 0; j < f; ++j) {
    xs.col(j) = (x.col(kept[static_cast<std::size_t>(j)]).array() - mean[kept[static_cast<std::size_t>(j)]]) /
                scale[static_cast<std::size_t>(j)];
  }

  std::vector<double> alphas = options.alphas;
  std::sort(alphas.begin(), alphas.end(), std::greater<>());

  // Mean validation MSE per (alpha, output).
  const std::vector<int> fold = assign_folds(static_cast<std::size_t>(n), options.folds, groups);
  Matrix cv_error = Matrix::Zero(static_cast<Eigen::Index>(alphas.size()), y.cols());
  for (int k = 0; k < options.folds; ++k) {
    std::vector<Eigen::Index> train, valid;
    for (Eigen::Index i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == k ? valid : train).push_back(i);
    const Matrix x_train = select_rows(xs, train);
    const Matrix y_train = select_rows(y, train);
    const Problem p = centered_problem(x_train, y_train);
    const Matrix x_valid = select_rows(xs, valid).rowwise() - p.x_mean.transpose();
    const Matrix y_valid = select_rows(y, valid);
    for (Eigen::Index o = 0; o < y.cols(); ++o) {
      Vector w = Vector::Zero(f);
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        w = lasso_coordinate_descent(p.gram, p.xty.col(o), p.yty[o], alphas[a], options.max_iter, options.tol, &w)
                .coef;
        const Vector residual = (x_valid * w).array() + p.y_mean[o] - y_valid.col(o).array();
        cv_error(static_cast<Eigen::Index>(a), o) += residual.squaredNorm() / static_cast<double>(valid.size());
      }
    }
  }

  const Problem full = centered_problem(xs, y);
  for (Eigen::Index o = 0; o < y.cols(); ++o) {
    // Strict improvement only, so ties keep the larger alpha.
    std::size_t best = 0;
    for (std::size_t a = 1; a < alphas.size(); ++a) {
      if (cv_error(static_cast<Eigen::Index>(a), o) < cv_error(static_cast<Eigen::Index>(best), o)) best = a;
    }
    result.alpha[static_cast<std::size_t>(o)] = alphas[best];
    // Walk the path down to the chosen alpha for a good warm start.
    Vector w = Vector::Zero(f);
    for (std::size_t a = 0; a <= best; ++a) {
      const auto cd = lasso_coordinate_descent(full.gram, full.xty.col(o), full.yty[o], alphas[a], options.max_iter,
                                               options.tol, &w);
      w = cd.coef;
      if (a == best && !cd.converged) {
        log::warn("lasso: output {} did not converge in {} sweeps at alpha {}", o, options.max_iter, alphas[a]);
      }
    }
    double shift = 0.0;
    for (Eigen::Index j = 0; j < f; ++j) {
      const double c = w[j] / scale[static_cast<std::size_t>(j)];
      result.coef(o, kept[static_cast<std::size_t>(j)]) = c;
      shift += c * mean[kept[static_cast<std::size_t>(j)]];
    }
    result.intercept[o] = y_mean[o] - shift;
  }
  return result;
}

}  // namespace symetric
