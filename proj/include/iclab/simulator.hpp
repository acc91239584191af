#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "iclab/errors.hpp"
#include "iclab/instance.hpp"
#include "iclab/random.hpp"

namespace iclab::sim {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Tasks and contexts

// k pretraining task vectors, one per row.
template <typename Scalar = double>
struct TaskSet {
  Matrix<Scalar> vectors;

  long k() const { return vectors.rows(); }
  int d() const { return static_cast<int>(vectors.cols()); }
};

template <typename Scalar = double>
Vector<Scalar> sample_task(int d, TaskPrior prior, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector<Scalar> w(d);
  for (int j = 0; j < d; ++j) w[j] = static_cast<Scalar>(normal(rng));
  if (prior == TaskPrior::sphere) {
    w *= static_cast<Scalar>(std::sqrt(static_cast<double>(d))) / w.norm();
  }
  return w;
}

// Rows i.i.d. N(0, I_d), or uniform on the sphere of radius sqrt(d).
template <typename Scalar = double>
TaskSet<Scalar> sample_task_set(const FiniteInstance& inst, Rng& rng) {
  if (inst.k < 1) throw DomainError("sample_task_set: k must be positive");
  TaskSet<Scalar> tasks{Matrix<Scalar>(inst.k, inst.d)};
  for (long i = 0; i < inst.k; ++i) tasks.vectors.row(i) = sample_task<Scalar>(inst.d, inst.task_prior, rng).transpose();
  return tasks;
}

// One context: rows 0..ell-1 of xs are the in-context inputs, row ell is the query.
template <typename Scalar = double>
struct ContextSample {
  Matrix<Scalar> xs;  // (ell + 1) x d
  Vector<Scalar> ys;  // ell
  Scalar target = 0;  // y_{ell+1}, noisy
  long task_index = -1;

  int ell() const { return static_cast<int>(ys.size()); }
  int d() const { return static_cast<int>(xs.cols()); }
  auto inputs() const { return xs.topRows(ys.size()); }
  Vector<Scalar> query() const { return xs.row(ys.size()).transpose(); }
};

// x_i ~ N(0, I_d/d), y_i = <x_i, w> + eps_i with eps_i ~ N(0, rho).
template <typename Scalar = double, typename Derived>
ContextSample<Scalar> sample_context(const Eigen::MatrixBase<Derived>& task, int ell, double rho, Rng& rng,
                                     long task_index = -1) {
  if (ell < 1) throw DomainError("sample_context: ell must be positive");
  const int d = static_cast<int>(task.size());
  std::normal_distribution<double> normal;
  const double x_scale = 1.0 / std::sqrt(static_cast<double>(d));
  const double noise_scale = std::sqrt(rho);

  ContextSample<Scalar> c;
  c.xs.resize(ell + 1, d);
  for (int i = 0; i <= ell; ++i)
    for (int j = 0; j < d; ++j) c.xs(i, j) = static_cast<Scalar>(x_scale * normal(rng));
  const Vector<Scalar> clean = c.xs * task.template cast<Scalar>();
  c.ys.resize(ell);
  for (int i = 0; i < ell; ++i) c.ys[i] = clean[i] + static_cast<Scalar>(noise_scale * normal(rng));
  c.target = clean[ell] + static_cast<Scalar>(noise_scale * normal(rng));
  c.task_index = task_index;
  return c;
}

template <typename Scalar = double, typename Derived>
ContextSample<Scalar> sample_context(const Eigen::MatrixBase<Derived>& task, const FiniteInstance& inst, Rng& rng,
                                     long task_index = -1) {
  return sample_context<Scalar>(task, inst.ell, inst.rho, rng, task_index);
}

// ---------------------------------------------------------------------------
// Features

// v = [ (d/ell) sum_i y_i x_i ; (1/ell) sum_i y_i^2 ], so that H_Z = x_query v^T.
template <typename Scalar>
Vector<Scalar> context_summary(const ContextSample<Scalar>& c) {
  const int d = c.d(), ell = c.ell();
  Vector<Scalar> v(d + 1);
  v.head(d) = (static_cast<Scalar>(d) / static_cast<Scalar>(ell)) * (c.inputs().transpose() * c.ys);
  v[d] = c.ys.squaredNorm() / static_cast<Scalar>(ell);
  return v;
}

template <typename Scalar = double>
struct FeatureMatrix {
  Matrix<Scalar> h;  // d x (d+1), rank <= 1
};

template <typename Scalar>
FeatureMatrix<Scalar> build_features(const ContextSample<Scalar>& c) {
  return {c.query() * context_summary(c).transpose()};
}

// Row-major vectorization; vec(x v^T) = x (kron) v.
template <typename Scalar>
Vector<Scalar> vec_row_major(const Matrix<Scalar>& m) {
  Vector<Scalar> out(m.size());
  Eigen::Map<RowMajorMatrix<Scalar>>(out.data(), m.rows(), m.cols()) = m;
  return out;
}

template <typename Scalar>
Matrix<Scalar> unvec_row_major(const Vector<Scalar>& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const RowMajorMatrix<Scalar>>(v.data(), rows, cols);
}

// ---------------------------------------------------------------------------
// Ridge pretraining

template <typename Scalar = double>
struct AttentionParams {
  Matrix<Scalar> gamma;  // d x (d+1)

  Scalar predict(const FeatureMatrix<Scalar>& f) const { return (gamma.array() * f.h.array()).sum(); }
};

enum class RidgeRoute { automatic, primal, dual };

inline std::string_view to_string(RidgeRoute r) {
  switch (r) {
    case RidgeRoute::primal: return "primal";
    case RidgeRoute::dual: return "dual";
    default: return "automatic";
  }
}

// Streams contexts into the ridge problem
//   min_G  sum_mu (y_mu - <G, H_mu>)^2 + (n/d) lambda ||G||_F^2.
// Primal route keeps the D x D Gram matrix (D = d(d+1)) and folds features in
// blocks; dual route keeps the n x D feature rows and solves in n dimensions.
// `automatic` picks the smaller system from the expected n.
template <typename Scalar = double>
class RidgeAccumulator {
 public:
  static constexpr Eigen::Index kBlockRows = 256;

  RidgeAccumulator(int d, long n_expected, RidgeRoute route = RidgeRoute::automatic)
      : d_(d), dim_(static_cast<Eigen::Index>(d) * (d + 1)) {
    if (d < 1) throw DomainError("RidgeAccumulator: d must be positive");
    route_ = route;
    if (route_ == RidgeRoute::automatic) route_ = n_expected < dim_ ? RidgeRoute::dual : RidgeRoute::primal;
    if (route_ == RidgeRoute::primal) {
      gram_ = Matrix<Scalar>::Zero(dim_, dim_);
      rhs_ = Vector<Scalar>::Zero(dim_);
      block_.resize(kBlockRows, dim_);
      block_targets_.resize(kBlockRows);
    } else {
      block_.resize(std::max<long>(n_expected, 1), dim_);
      block_targets_.resize(block_.rows());
    }
  }

  RidgeRoute route() const { return route_; }
  long count() const { return count_; }

  // Adds the context with H = query * summary^T.
  template <typename D1, typename D2>
  void add(const Eigen::MatrixBase<D1>& query, const Eigen::MatrixBase<D2>& summary, Scalar target) {
    auto row = next_row(target);
    for (int i = 0; i < d_; ++i) row.segment(static_cast<Eigen::Index>(i) * (d_ + 1), d_ + 1) = query[i] * summary.transpose();
  }

  void add(const FeatureMatrix<Scalar>& f, Scalar target) {
    if (f.h.rows() != d_ || f.h.cols() != d_ + 1) throw DomainError("RidgeAccumulator: feature shape mismatch");
    next_row(target) = vec_row_major(f.h).transpose();
  }

  AttentionParams<Scalar> solve(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("pretrain_ridge: lambda must be positive");
    if (count_ == 0) throw DomainError("pretrain_ridge: no contexts");
    const Scalar reg = static_cast<Scalar>(static_cast<double>(count_) / d_ * lambda);
    Vector<Scalar> vec_gamma;
    if (route_ == RidgeRoute::primal) {
      flush();
      Matrix<Scalar> system = gram_;
      system.diagonal().array() += reg;
      Eigen::LLT<Matrix<Scalar>, Eigen::Lower> llt(system);
      check(llt, "primal");
      vec_gamma = llt.solve(rhs_);
    } else {
      const auto features = block_.topRows(count_);
      Matrix<Scalar> kernel = Matrix<Scalar>::Zero(count_, count_);
      kernel.template selfadjointView<Eigen::Lower>().rankUpdate(features);
      kernel.diagonal().array() += reg;
      Eigen::LLT<Matrix<Scalar>, Eigen::Lower> llt(kernel);
      check(llt, "dual");
      vec_gamma = features.transpose() * llt.solve(block_targets_.head(count_));
    }
    return {unvec_row_major(vec_gamma, d_, d_ + 1)};
  }

 private:
  auto next_row(Scalar target) {
    if (route_ == RidgeRoute::primal) {
      if (pending_ == kBlockRows) flush();
      block_targets_[pending_] = target;
      ++count_;
      return block_.row(pending_++);
    }
    if (count_ == block_.rows()) {
      block_.conservativeResize(2 * block_.rows(), Eigen::NoChange);
      block_targets_.conservativeResize(block_.rows());
    }
    block_targets_[count_] = target;
    return block_.row(count_++);
  }

  void flush() {
    if (pending_ == 0) return;
    const auto rows = block_.topRows(pending_);
    gram_.template selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose());
    rhs_.noalias() += rows.transpose() * block_targets_.head(pending_);
    pending_ = 0;
  }

  template <typename Solver>
  static void check(const Solver& llt, const char* which) {
    if (llt.info() != Eigen::Success) {
      throw NumericalError(std::string("pretrain_ridge: ") + which +
                           " Cholesky failed (reciprocal condition estimate " + std::to_string(llt.rcond()) + ")");
    }
  }

  int d_;
  Eigen::Index dim_;
  RidgeRoute route_;
  long count_ = 0;
  Eigen::Index pending_ = 0;
  Matrix<Scalar> gram_;   // primal: lower triangle of sum f f^T
  Vector<Scalar> rhs_;    // primal: sum y f
  Matrix<Scalar> block_;  // primal: pending rows; dual: all rows
  Vector<Scalar> block_targets_;
};

// Closed-form ridge solution over materialized features.
template <typename Scalar>
AttentionParams<Scalar> pretrain_ridge(std::span<const FeatureMatrix<Scalar>> features, std::span<const Scalar> targets,
                                       double lambda, RidgeRoute route = RidgeRoute::automatic) {
  if (features.size() != targets.size()) throw DomainError("pretrain_ridge: features/targets size mismatch");
  if (features.empty()) throw DomainError("pretrain_ridge: no contexts");
  const int d = static_cast<int>(features.front().h.rows());
  RidgeAccumulator<Scalar> acc(d, static_cast<long>(features.size()), route);
  for (std::size_t i = 0; i < features.size(); ++i) acc.add(features[i], targets[i]);
  return acc.solve(lambda);
}

// The pretraining objective itself, for optimality checks.
template <typename Scalar>
double ridge_objective(const Matrix<Scalar>& gamma, std::span<const FeatureMatrix<Scalar>> features,
                       std::span<const Scalar> targets, double lambda) {
  double loss = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double r = static_cast<double>(targets[i]) - static_cast<double>((gamma.array() * features[i].h.array()).sum());
    loss += r * r;
  }
  const double d = static_cast<double>(gamma.rows());
  return loss + static_cast<double>(features.size()) / d * lambda * static_cast<double>(gamma.squaredNorm());
}

// ---------------------------------------------------------------------------
// Evaluation

// Moments of the test task distribution. r_test = E[w w^T], b_test = E[w];
// the remaining fields carry the norm statistics (s = |w|^2/d) that make the
// population error exact for any task law. On the sphere s == 1 and they
// collapse to (1, b_test, 1).
template <typename Scalar = double>
struct TestMoments {
  Matrix<Scalar> r_test;
  Vector<Scalar> b_test;
  Scalar mean_s = 1;     // E[s]
  Vector<Scalar> s_b;    // E[s w]
  Scalar mean_s2 = 1;    // E[s^2]

  int d() const { return static_cast<int>(b_test.size()); }

  static TestMoments icl(int d, TaskPrior prior = TaskPrior::sphere) {
    TestMoments m;
    m.r_test = Matrix<Scalar>::Identity(d, d);
    m.b_test = Vector<Scalar>::Zero(d);
    m.s_b = Vector<Scalar>::Zero(d);
    m.mean_s = 1;
    // |w|^2 ~ chi^2_d for the Gaussian prior: Var(s) = 2/d
    m.mean_s2 = prior == TaskPrior::gaussian ? Scalar(1) + Scalar(2) / d : Scalar(1);
    return m;
  }

  static TestMoments idg(const TaskSet<Scalar>& tasks) {
    const auto& w = tasks.vectors;
    const Scalar k = static_cast<Scalar>(tasks.k());
    const Vector<Scalar> s = w.rowwise().squaredNorm() / static_cast<Scalar>(tasks.d());
    TestMoments m;
    m.r_test = w.transpose() * w / k;
    m.b_test = w.colwise().mean().transpose();
    m.mean_s = s.mean();
    m.s_b = w.transpose() * s / k;
    m.mean_s2 = s.squaredNorm() / k;
    return m;
  }

  // Moments of a sphere-supported law given only (R, b).
  static TestMoments from_second_moments(Matrix<Scalar> r, Vector<Scalar> b) {
    TestMoments m;
    m.s_b = b;
    m.r_test = std::move(r);
    m.b_test = std::move(b);
    return m;
  }
};

// Exact expected test error of a fixed Gamma, averaged over queries, context
// inputs, noise and the task law summarized by `moments` (including the
// finite-ell terms). Context length enters as ell = alpha * d.
template <typename Scalar>
double population_error(const Matrix<Scalar>& gamma, const TestMoments<Scalar>& moments, double alpha, double rho) {
  const int d = moments.d();
  if (gamma.rows() != d || gamma.cols() != d + 1) throw DomainError("population_error: shape mismatch");
  using M = Matrix<double>;
  using V = Vector<double>;
  const M g1 = gamma.leftCols(d).template cast<double>();
  const V g2 = gamma.col(d).template cast<double>();
  const M r = moments.r_test.template cast<double>();
  const V b = moments.b_test.template cast<double>();
  const V s_b = moments.s_b.template cast<double>();
  const double mean_s = moments.mean_s, mean_s2 = moments.mean_s2;
  const double inv_ell = 1.0 / (alpha * d);

  const double sigma2 = mean_s + rho;                           // E[y^2]
  const double sigma4 = mean_s2 + 2.0 * rho * mean_s + rho * rho;  // E[(s + rho)^2]
  const V sigma2_w = s_b + rho * b;                              // E[(s + rho) w]

  const double linear = (g1.array() * r.array()).sum() + g2.dot(sigma2_w);
  const double quadratic = d * inv_ell * sigma2 * g1.squaredNorm() + (1.0 + inv_ell) * (g1 * r).cwiseProduct(g1).sum() +
                           2.0 * (1.0 + 2.0 * inv_ell) * g2.dot(g1 * sigma2_w) +
                           (1.0 + 2.0 * inv_ell) * sigma4 * g2.squaredNorm();
  return sigma2 - 2.0 / d * linear + quadratic / d;
}

struct ErrorEstimate {
  double mean = 0.0;
  double std_err = 0.0;
};

// Running mean / variance (Welford).
class MeanAccumulator {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / n_;
    m2_ += delta * (x - mean_);
  }
  long count() const { return n_; }
  ErrorEstimate estimate() const {
    if (n_ < 2) return {mean_, 0.0};
    return {mean_, std::sqrt(m2_ / (n_ - 1) / n_)};
  }

 private:
  long n_ = 0;
  double mean_ = 0.0, m2_ = 0.0;
};

// Monte Carlo estimate of E[(y_{ell+1} - <Gamma, H_Z>)^2] over n_test fresh
// contexts. ICL draws a fresh task per context from the prior; IDG draws a
// pretraining task uniformly.
template <typename Scalar>
ErrorEstimate empirical_error(const Matrix<Scalar>& gamma, const FiniteInstance& inst, const TaskSet<Scalar>& tasks,
                              EvalMode mode, long n_test, Rng& rng) {
  if (n_test < 1) throw DomainError("empirical_error: n_test must be positive");
  if (mode == EvalMode::idg && tasks.k() < 1) throw DomainError("empirical_error: IDG needs a task set");
  std::uniform_int_distribution<long> pick(0, std::max<long>(tasks.k() - 1, 0));
  MeanAccumulator acc;
  for (long t = 0; t < n_test; ++t) {
    ContextSample<Scalar> c;
    if (mode == EvalMode::icl) {
      c = sample_context<Scalar>(sample_task<Scalar>(inst.d, inst.task_prior, rng), inst, rng);
    } else {
      const long idx = pick(rng);
      c = sample_context<Scalar>(tasks.vectors.row(idx).transpose(), inst, rng, idx);
    }
    const Scalar pred = c.query().dot(gamma * context_summary(c));
    const double err = static_cast<double>(c.target - pred);
    acc.add(err * err);
  }
  return acc.estimate();
}

}  // namespace iclab::sim
