#include "nhhj/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "nhhj/errors.hpp"

namespace nhhj {
namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

Vector checked_eval(const VectorMap& f, const ChartPoint& q) {
  Vector value = f(q);
  if (!value.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite map value at q = [" << q.transpose() << "]";
    throw EvaluationDomainError(msg.str());
  }
  return value;
}

Matrix central_difference_jacobian(const VectorMap& f, const ChartPoint& q, double step_scale) {
  const Eigen::Index n = q.size();
  Matrix jac;
  ChartPoint probe = q;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = step_scale * std::max(1.0, std::abs(q[j]));
    probe[j] = q[j] + h;
    const Vector plus = checked_eval(f, probe);
    probe[j] = q[j] - h;
    const Vector minus = checked_eval(f, probe);
    probe[j] = q[j];
    if (j == 0) jac.resize(plus.size(), n);
    // Divide by the representable step actually taken.
    jac.col(j) = (plus - minus) / ((q[j] + h) - (q[j] - h));
  }
  if (n == 0) jac.resize(f(q).size(), 0);
  return jac;
}

}  // namespace

void DifferentiationStrategy::validate() const {
  if (!(fd_step_scale > 0.0) || !std::isfinite(fd_step_scale)) {
    throw std::invalid_argument("fd_step_scale must be a positive finite number");
  }
}

Matrix ConstraintDistribution::at(const ChartPoint& q) const {
  if (count == 0) return Matrix(0, dim);
  Matrix A = matrix(q);
  if (A.rows() != count || A.cols() != dim) {
    throw std::invalid_argument("constraint matrix has shape " + std::to_string(A.rows()) + "x" +
                                std::to_string(A.cols()) + ", expected " + std::to_string(count) +
                                "x" + std::to_string(dim));
  }
  if (!all_finite(A)) throw EvaluationDomainError("non-finite constraint matrix");
  return A;
}

std::vector<Matrix> ConstraintDistribution::partials_at(const ChartPoint& q,
                                                        const DifferentiationStrategy& strat) const {
  if (count == 0) return std::vector<Matrix>(static_cast<std::size_t>(dim), Matrix(0, dim));
  if (strat.mode == DifferentiationStrategy::Mode::kAnalytic && partials) {
    std::vector<Matrix> dA = (*partials)(q);
    if (dA.size() != static_cast<std::size_t>(dim)) {
      throw std::invalid_argument("constraint partials must have one entry per coordinate");
    }
    return dA;
  }
  // Differentiate vec(A) column-major.
  const VectorMap flat = [this](const Vector& x) -> Vector {
    const Matrix A = at(x);
    return Eigen::Map<const Vector>(A.data(), A.size());
  };
  const Matrix jac = central_difference_jacobian(flat, q, strat.fd_step_scale);
  std::vector<Matrix> dA;
  dA.reserve(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    dA.emplace_back(Eigen::Map<const Matrix>(jac.col(j).data(), count, dim));
  }
  return dA;
}

ConstraintDistribution unconstrained_distribution(int dim) {
  ConstraintDistribution dist;
  dist.dim = dim;
  dist.count = 0;
  dist.matrix = [dim](const Vector&) { return Matrix(0, dim); };
  return dist;
}

ConstraintDistribution constant_distribution(Matrix rows) {
  ConstraintDistribution dist;
  dist.dim = static_cast<int>(rows.cols());
  dist.count = static_cast<int>(rows.rows());
  dist.matrix = [rows](const Vector&) { return rows; };
  const int n = dist.dim;
  const auto k = rows.rows();
  dist.partials = [n, k](const Vector&) {
    return std::vector<Matrix>(static_cast<std::size_t>(n), Matrix::Zero(k, n));
  };
  return dist;
}

Matrix jacobian(const VectorMap& f, const ChartPoint& q, const DifferentiationStrategy& strat,
                const std::optional<MatrixMap>& analytic) {
  if (strat.mode == DifferentiationStrategy::Mode::kAnalytic && analytic) {
    Matrix jac = (*analytic)(q);
    if (!all_finite(jac)) throw EvaluationDomainError("non-finite analytic Jacobian");
    return jac;
  }
  strat.validate();
  return central_difference_jacobian(f, q, strat.fd_step_scale);
}

Vector gradient(const ScalarMap& f, const ChartPoint& q, double step_scale) {
  const VectorMap wrapped = [&f](const Vector& x) {
    Vector v(1);
    v[0] = f(x);
    return v;
  };
  return central_difference_jacobian(wrapped, q, step_scale).row(0).transpose();
}

Matrix nullspace_basis(const Matrix& A, double rank_tol) {
  const Eigen::Index k = A.rows();
  const Eigen::Index n = A.cols();
  if (k > n) {
    throw DegenerateConstraintsError("more constraints (" + std::to_string(k) +
                                     ") than coordinates (" + std::to_string(n) + ")");
  }
  if (k == 0) return Matrix::Identity(n, n);
  if (!all_finite(A)) throw EvaluationDomainError("non-finite constraint matrix");

  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double sigma_max = sigma[0];
  if (!(sigma_max > 0.0) || sigma[k - 1] <= rank_tol * sigma_max) {
    std::ostringstream msg;
    msg << "constraint matrix is rank deficient (singular values " << sigma.transpose() << ")";
    throw DegenerateConstraintsError(msg.str());
  }
  return svd.matrixV().rightCols(n - k);
}

double d_oneform_pair(const OneForm& gamma, const ChartPoint& q, const TangentVec& v,
                      const TangentVec& w, const DifferentiationStrategy& strat) {
  const Matrix dg = jacobian(gamma.eval, q, strat, gamma.jacobian);
  // dg(i, j) = d(gamma_i)/dq^j, so w^T dg v = sum_ij dgamma_i/dq^j v^j w^i.
  return w.dot(dg * v) - v.dot(dg * w);
}

TangentVec lie_bracket(const VectorField& X, const VectorField& Y, const ChartPoint& q,
                       const DifferentiationStrategy& strat) {
  const Matrix JX = jacobian(X.eval, q, strat, X.jacobian);
  const Matrix JY = jacobian(Y.eval, q, strat, Y.jacobian);
  return JY * checked_eval(X.eval, q) - JX * checked_eval(Y.eval, q);
}

std::vector<VectorField> local_frame(const ConstraintDistribution& dist, const ChartPoint& q0,
                                     double rank_tol) {
  const Matrix basis = nullspace_basis(dist.at(q0), rank_tol);
  std::vector<VectorField> frame;
  frame.reserve(static_cast<std::size_t>(basis.cols()));
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    const Vector direction = basis.col(i);
    if (dist.count == 0) {
      const Eigen::Index n = direction.size();
      frame.push_back({[direction](const Vector&) { return direction; },
                       [n](const Vector&) { return Matrix(Matrix::Zero(n, n)); }});
      continue;
    }
    frame.push_back({[dist, direction](const Vector& q) -> Vector {
                       const Matrix A = dist.at(q);
                       const Eigen::LDLT<Matrix> gram(A * A.transpose());
                       if (gram.info() != Eigen::Success) {
                         throw DegenerateConstraintsError("A A^T is singular");
                       }
                       return direction - A.transpose() * gram.solve(A * direction);
                     },
                     std::nullopt});
  }
  return frame;
}

BracketRankResult bracket_generating_rank(const ConstraintDistribution& dist, const ChartPoint& q,
                                          int max_depth, double rank_tol,
                                          const DifferentiationStrategy& strat) {
  if (max_depth < 0) throw std::invalid_argument("max_depth must be nonnegative");
  strat.validate();
  const int n = dist.dim;

  const std::vector<VectorField> frame = local_frame(dist, q, rank_tol);
  std::vector<VectorField> level = frame;
  std::vector<Vector> span;
  for (const auto& field : frame) span.push_back(field.eval(q));

  const auto rank_of = [n, &span](double threshold) {
    if (span.empty()) return 0;
    Matrix cols(n, static_cast<Eigen::Index>(span.size()));
    for (std::size_t c = 0; c < span.size(); ++c) cols.col(static_cast<Eigen::Index>(c)) = span[c];
    const Eigen::JacobiSVD<Matrix> svd(cols);
    const Vector& sigma = svd.singularValues();
    if (sigma.size() == 0 || !(sigma[0] > 0.0)) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma[i] > threshold * sigma[0]) ++r;
    }
    return r;
  };

  BracketRankResult result;
  result.rank = rank_of(rank_tol);
  result.profile.push_back(result.rank);
  result.depth_reached = 0;

  for (int depth = 1; depth <= max_depth && result.rank < n; ++depth) {
    const double step = std::pow(strat.fd_step_scale, std::pow(2.0 / 3.0, depth - 1));
    const double noise = 100.0 * step * step;
    const DifferentiationStrategy level_strat =
        DifferentiationStrategy::finite_difference(step);

    std::vector<VectorField> next;
    next.reserve(frame.size() * level.size());
    for (const auto& outer : frame) {
      for (const auto& inner : level) {
        VectorField bracket{[outer, inner, level_strat](const Vector& x) {
                              return lie_bracket(outer, inner, x, level_strat);
                            },
                            std::nullopt};
        span.push_back(bracket.eval(q));
        next.push_back(std::move(bracket));
      }
    }
    level = std::move(next);

    const int r = std::max(result.rank, rank_of(std::max(rank_tol, noise)));
    result.profile.push_back(r);
    if (r > result.rank) {
      result.rank = r;
      result.depth_reached = depth;
    }
  }
  return result;
}

}  // namespace nhhj
