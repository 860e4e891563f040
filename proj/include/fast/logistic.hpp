#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fast {

// Dense 0/1 design matrix, row-major. Column 0 is conventionally the
// intercept (all ones).
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::uint8_t operator()(std::size_t r, std::size_t c) const {
    return cells_[r * cols_ + c];
  }
  void set(std::size_t r, std::size_t c, bool value) {
    cells_[r * cols_ + c] = value ? 1 : 0;
  }

  /// Appends a row; `values` must have cols() entries.
  void push_row(std::span<const std::uint8_t> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Binary outcomes collapsed onto the distinct covariate patterns of a design.
// Patterns are kept sorted by bit mask (bit j = column j), which makes
// everything downstream independent of subject order.
struct GroupedBinomialData {
  struct Pattern {
    std::uint64_t mask = 0;
    double trials = 0.0;
    double events = 0.0;
  };

  std::size_t n_cols = 0;
  std::vector<Pattern> patterns;

  static GroupedBinomialData from_rows(const BinaryMatrix& design,
                                       std::span<const std::uint8_t> outcome);

  /// Keeps only `columns` (in the given order) and merges patterns that
  /// become identical.
  GroupedBinomialData select_columns(std::span<const std::size_t> columns) const;

  double total_trials() const;
};

struct LogisticFit {
  Eigen::VectorXd coefficients;
  double log_likelihood = 0.0;
  bool converged = false;
  int n_iterations = 0;
  // Inverse observed information at the final coefficients. Empty when the
  // information matrix was singular.
  Eigen::MatrixXd covariance;
  // Non-convergence with coefficients drifting off to infinity, the
  // signature of (quasi-)complete separation.
  bool separation = false;
};

inline constexpr double kIrlsTolerance = 1e-10;
inline constexpr int kIrlsMaxIterations = 50;

/// Maximum-likelihood logistic regression by iteratively reweighted least
/// squares. Throws InputError on a rank-deficient design or a length
/// mismatch. Separation is reported through the returned fit, not thrown.
LogisticFit fit_logistic(const GroupedBinomialData& data);
LogisticFit fit_logistic(const BinaryMatrix& design,
                         std::span<const std::uint8_t> outcome);

/// Gradient of the Bernoulli log-likelihood at `coefficients`.
Eigen::VectorXd logistic_score(const GroupedBinomialData& data,
                               const Eigen::VectorXd& coefficients);

}  // namespace fast
