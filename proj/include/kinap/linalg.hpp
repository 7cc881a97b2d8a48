#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace kinap::linalg {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed-row sparse matrix. Duplicate triplets are summed on
/// construction and rows are kept sorted by column.
class SparseMatrix {
public:
  SparseMatrix() = default;
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::span<const Triplet> triplets, bool symmetric = false);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  bool symmetric() const { return symmetric_; }

  /// Entry (r, c), zero when not stored.
  double at(std::size_t r, std::size_t c) const;

  std::span<const std::size_t> row_cols(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;
  SparseMatrix transpose() const;

  /// Row-major dense copy; intended for small matrices and tests.
  std::vector<double> to_dense() const;

  /// Max absolute row sum.
  double norm_inf() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  bool symmetric_ = false;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// diag(row) * A * diag(col)
SparseMatrix diagonally_scaled(const SparseMatrix& A, std::span<const double> row,
                               std::span<const double> col);

/// A^T A, exactly symmetric by construction.
SparseMatrix normal_system(const SparseMatrix& A);

class NotPositiveDefinite : public std::runtime_error {
public:
  NotPositiveDefinite(std::size_t pivot, double value);
  std::size_t pivot() const { return pivot_; }

private:
  std::size_t pivot_;
};

struct SolveReport {
  int refinements = 0;
  double relative_residual = 0.0;
};

/// Factorization of a symmetric positive definite matrix with iterative
/// refinement against the original matrix: after at most three passes the
/// residual satisfies ||A x - b|| <= 1e-12 ||b|| whenever the conditioning
/// permits it.
class SpdSolver {
public:
  virtual ~SpdSolver() = default;

  const SparseMatrix& matrix() const { return matrix_; }
  std::size_t size() const { return matrix_.rows(); }

  std::vector<double> solve(std::span<const double> b, SolveReport* report = nullptr) const;

  /// One forward/backward substitution, no refinement.
  virtual std::vector<double> solve_unrefined(std::span<const double> b) const = 0;

  /// L L^T x in the original ordering; compared against A x to check the factor.
  virtual std::vector<double> apply_factor_product(std::span<const double> x) const = 0;

  static constexpr double kRefineTolerance = 1e-12;
  static constexpr int kMaxRefinements = 3;

protected:
  explicit SpdSolver(SparseMatrix A);
  SparseMatrix matrix_;
};

/// Envelope (profile) Cholesky after a reverse Cuthill-McKee reordering.
class SpdFactorization final : public SpdSolver {
public:
  explicit SpdFactorization(SparseMatrix A);

  std::vector<double> solve_unrefined(std::span<const double> b) const override;
  std::vector<double> apply_factor_product(std::span<const double> x) const override;

  std::span<const std::size_t> permutation() const { return perm_; }
  std::size_t envelope_size() const { return values_.size(); }
  std::size_t bandwidth() const;

private:
  double* row(std::size_t i) { return values_.data() + start_[i]; }
  const double* row(std::size_t i) const { return values_.data() + start_[i]; }

  std::vector<std::size_t> perm_;      // new -> old
  std::vector<std::size_t> inv_perm_;  // old -> new
  std::vector<std::size_t> first_;     // first column in the envelope of row i
  std::vector<std::size_t> start_;     // offset of L(i, first_[i]) in values_
  std::vector<double> values_;
};

/// Dense Cholesky; used for small systems and as an independent cross-check
/// of the envelope factorization.
class DenseSpdFactorization final : public SpdSolver {
public:
  explicit DenseSpdFactorization(SparseMatrix A);

  std::vector<double> solve_unrefined(std::span<const double> b) const override;
  std::vector<double> apply_factor_product(std::span<const double> x) const override;

private:
  std::size_t n_ = 0;
  std::vector<double> lower_;  // row-major n x n, lower triangle used
};

/// Least-squares solution of A x = b through a factorization of A^T A,
/// refined on the normal-equation residual A^T (b - A x) computed from A
/// itself (not from the normal matrix), which keeps the forward error at the
/// level of the conditioning of A for consistent systems.
std::vector<double> solve_least_squares(const SparseMatrix& A, const SpdSolver& normal,
                                        std::span<const double> b, SolveReport* report = nullptr,
                                        double tolerance = 1e-12, int max_refinements = 3);

/// Reverse Cuthill-McKee ordering (new -> old) of the symmetric pattern of A.
std::vector<std::size_t> reverse_cuthill_mckee(const SparseMatrix& A);

struct ConditionEstimate {
  double value = 0.0;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  int iterations = 0;
  /// False when the iteration cap was hit; value is then a lower bound.
  bool converged = false;
};

/// 2-norm condition number from power iteration (largest eigenvalue) and
/// inverse power iteration (smallest). A non-symmetric A is handled through
/// A^T A and the square root of its condition number.
ConditionEstimate condition_estimate(const SparseMatrix& A, bool symmetric,
                                     int max_iterations = 200, double tolerance = 1e-3);

double norm2(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

}  // namespace kinap::linalg
