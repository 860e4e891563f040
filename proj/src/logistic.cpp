#include "fast/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fast/errors.hpp"

namespace fast {

namespace {

double inv_logit(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// log(1 + exp(eta)) without overflow.
double softplus(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

Eigen::MatrixXd pattern_matrix(const GroupedBinomialData& data) {
  Eigen::MatrixXd x(data.patterns.size(), data.n_cols);
  for (std::size_t r = 0; r < data.patterns.size(); ++r) {
    for (std::size_t c = 0; c < data.n_cols; ++c) {
      x(r, c) = (data.patterns[r].mask >> c) & 1U ? 1.0 : 0.0;
    }
  }
  return x;
}

double log_likelihood(const GroupedBinomialData& data, const Eigen::VectorXd& eta) {
  double ll = 0.0;
  for (std::size_t r = 0; r < data.patterns.size(); ++r) {
    const auto& p = data.patterns[r];
    ll += p.events * eta(r) - p.trials * softplus(eta(r));
  }
  return ll;
}

}  // namespace

void BinaryMatrix::push_row(std::span<const std::uint8_t> values) {
  if (values.size() != cols_) throw InputError("BinaryMatrix: row width mismatch");
  for (auto v : values) cells_.push_back(v ? 1 : 0);
  ++rows_;
}

GroupedBinomialData GroupedBinomialData::from_rows(
    const BinaryMatrix& design, std::span<const std::uint8_t> outcome) {
  if (design.cols() == 0 || design.cols() > 64) {
    throw InputError("logistic design must have between 1 and 64 columns");
  }
  if (outcome.size() != design.rows()) {
    throw InputError("logistic outcome length does not match design rows");
  }
  std::map<std::uint64_t, Pattern> by_mask;
  for (std::size_t r = 0; r < design.rows(); ++r) {
    std::uint64_t mask = 0;
    for (std::size_t c = 0; c < design.cols(); ++c) {
      if (design(r, c)) mask |= std::uint64_t{1} << c;
    }
    auto& p = by_mask[mask];
    p.mask = mask;
    p.trials += 1.0;
    if (outcome[r] > 1) throw InputError("logistic outcome must be 0 or 1");
    p.events += outcome[r];
  }
  GroupedBinomialData data;
  data.n_cols = design.cols();
  data.patterns.reserve(by_mask.size());
  for (const auto& [mask, p] : by_mask) data.patterns.push_back(p);
  return data;
}

GroupedBinomialData GroupedBinomialData::select_columns(
    std::span<const std::size_t> columns) const {
  std::map<std::uint64_t, Pattern> by_mask;
  for (const auto& p : patterns) {
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] >= n_cols) throw InputError("select_columns: column out of range");
      if ((p.mask >> columns[j]) & 1U) mask |= std::uint64_t{1} << j;
    }
    auto& merged = by_mask[mask];
    merged.mask = mask;
    merged.trials += p.trials;
    merged.events += p.events;
  }
  GroupedBinomialData out;
  out.n_cols = columns.size();
  for (const auto& [mask, p] : by_mask) out.patterns.push_back(p);
  return out;
}

double GroupedBinomialData::total_trials() const {
  double n = 0.0;
  for (const auto& p : patterns) n += p.trials;
  return n;
}

Eigen::VectorXd logistic_score(const GroupedBinomialData& data,
                               const Eigen::VectorXd& coefficients) {
  const Eigen::MatrixXd x = pattern_matrix(data);
  const Eigen::VectorXd eta = x * coefficients;
  Eigen::VectorXd residual(data.patterns.size());
  for (std::size_t r = 0; r < data.patterns.size(); ++r) {
    residual(r) = data.patterns[r].events - data.patterns[r].trials * inv_logit(eta(r));
  }
  return x.transpose() * residual;
}

LogisticFit fit_logistic(const GroupedBinomialData& data) {
  const auto k = static_cast<Eigen::Index>(data.n_cols);
  if (k == 0) throw InputError("fit_logistic: design has no columns");
  if (data.total_trials() < static_cast<double>(k)) {
    throw InputError("fit_logistic: fewer observations than parameters");
  }
  const Eigen::MatrixXd x = pattern_matrix(data);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
  if (lu.rank() < k) throw InputError("fit_logistic: design columns are collinear");

  const auto m = x.rows();
  Eigen::VectorXd trials(m);
  Eigen::VectorXd events(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    trials(r) = data.patterns[r].trials;
    events(r) = data.patterns[r].events;
  }

  LogisticFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd mu(m);
  Eigen::VectorXd weight(m);
  auto update_moments = [&](const Eigen::VectorXd& eta) {
    for (Eigen::Index r = 0; r < m; ++r) {
      mu(r) = inv_logit(eta(r));
      weight(r) = trials(r) * mu(r) * (1.0 - mu(r));
    }
  };

  for (int iter = 1; iter <= kIrlsMaxIterations; ++iter) {
    const Eigen::VectorXd eta = x * fit.coefficients;
    update_moments(eta);
    const Eigen::VectorXd score = x.transpose() * (events - trials.cwiseProduct(mu));
    const Eigen::MatrixXd information = x.transpose() * weight.asDiagonal() * x;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(information);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
    const Eigen::VectorXd step = ldlt.solve(score);
    if (!step.allFinite()) break;
    fit.coefficients += step;
    fit.n_iterations = iter;
    if (step.cwiseAbs().maxCoeff() < kIrlsTolerance) {
      fit.converged = true;
      break;
    }
  }

  const Eigen::VectorXd eta = x * fit.coefficients;
  fit.log_likelihood = log_likelihood(data, eta);
  update_moments(eta);
  const Eigen::MatrixXd information = x.transpose() * weight.asDiagonal() * x;
  Eigen::FullPivLU<Eigen::MatrixXd> info_lu(information);
  if (info_lu.isInvertible()) fit.covariance = info_lu.inverse();

  if (!fit.converged) {
    const bool boundary = (weight.array() < 1e-12 * trials.array()).any();
    fit.separation = boundary || !fit.coefficients.allFinite() ||
                     fit.coefficients.cwiseAbs().maxCoeff() > 20.0;
  }
  return fit;
}

LogisticFit fit_logistic(const BinaryMatrix& design,
                         std::span<const std::uint8_t> outcome) {
  return fit_logistic(GroupedBinomialData::from_rows(design, outcome));
}

}  // namespace fast
