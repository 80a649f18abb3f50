#pragma once

/// Sparse LU with partial pivoting.
///
/// UMFPACK is tried first. Its dense kernels come from the system BLAS, and a
/// miscompiled or mis-detected BLAS can return NaN or garbage factors with a
/// success status. Every factorisation is therefore checked on a probe
/// right-hand side; if the check fails the matrix is refactored with Eigen's
/// SparseLU (COLAMD ordering), which has no external dependency.

#include <chrono>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <umfpack.h>

#include "phifd/csr.hpp"
#include "phifd/errors.hpp"
#include "phifd/reduce.hpp"
#include "phifd/solve_report.hpp"

namespace phifd {

enum class LuBackend { Umfpack, Eigen };

inline const char* to_string(LuBackend b) { return b == LuBackend::Umfpack ? "umfpack" : "eigen"; }

/// Relative residual a factorisation must reach on the probe system.
inline constexpr double kLuProbeTolerance = 1e-8;

/// Owns a numeric LU factorisation of a square CSR matrix.
class LuFactorization {
public:
  /// `allow_umfpack = false` skips straight to the Eigen backend.
  explicit LuFactorization(const CsrMatrix& a, bool allow_umfpack = true) : a_(&a), n_(a.rows) {
    if (a.rows != a.cols) throw ConfigError("LU: matrix must be square");
    if (n_ == 0) return; // UMFPACK traps on an empty system
    if (allow_umfpack && try_umfpack() && probe_ok()) {
      backend_ = LuBackend::Umfpack;
      return;
    }
    umf_.reset();
    factor_eigen();
    backend_ = LuBackend::Eigen;
    if (!probe_ok()) throw SingularMatrixError("LU factors fail the residual probe");
  }

  std::size_t size() const { return n_; }
  LuBackend backend() const { return backend_; }

  /// Solves A x = b.
  std::vector<double> solve(std::span<const double> b) const { return run(b, false); }

  /// Solves A^T x = b.
  std::vector<double> solve_transpose(std::span<const double> b) const { return run(b, true); }

private:
  struct UmfDeleter {
    void operator()(void* p) const { umfpack_di_free_numeric(&p); }
  };
  using EigenMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;
  using EigenLu = Eigen::SparseLU<EigenMatrix, Eigen::COLAMDOrdering<Index>>;

  // UMFPACK reads column-compressed storage; the CSR arrays of A are the CSC
  // arrays of A^T, so the factor is of A^T and the solve modes swap.
  bool try_umfpack() {
    const CsrMatrix& a = *a_;
    double control[UMFPACK_CONTROL];
    umfpack_di_defaults(control);
    double info[UMFPACK_INFO];
    void* symbolic = nullptr;
    const int n = static_cast<int>(n_);
    int status = umfpack_di_symbolic(n, n, a.row_offsets.data(), a.column_indices.data(),
                                     a.values.data(), &symbolic, control, info);
    if (status != UMFPACK_OK) {
      umfpack_di_free_symbolic(&symbolic);
      return false;
    }
    void* numeric = nullptr;
    status = umfpack_di_numeric(a.row_offsets.data(), a.column_indices.data(), a.values.data(),
                                symbolic, &numeric, control, info);
    umfpack_di_free_symbolic(&symbolic);
    if (status != UMFPACK_OK) {
      umfpack_di_free_numeric(&numeric);
      return false;
    }
    umf_.reset(numeric);
    return true;
  }

  void factor_eigen() {
    const CsrMatrix& a = *a_;
    const Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, Index>> view(
        static_cast<Index>(a.rows), static_cast<Index>(a.cols), static_cast<Index>(a.nnz()),
        a.row_offsets.data(), a.column_indices.data(), a.values.data());
    eigen_matrix_ = view;
    eigen_matrix_.makeCompressed();
    eigen_ = std::make_unique<EigenLu>();
    eigen_->analyzePattern(eigen_matrix_);
    eigen_->factorize(eigen_matrix_);
    if (eigen_->info() == Eigen::NumericalIssue)
      throw SingularMatrixError("matrix is singular (zero pivot in LU)");
    if (eigen_->info() != Eigen::Success)
      throw SolverError("LU factorisation failed: " + eigen_->lastErrorMessage());
  }

  /// Solves A x = A 1 and checks the residual.
  bool probe_ok() const {
    if (n_ == 0) return true;
    const std::vector<double> ones(n_, 1.0);
    std::vector<double> b(n_);
    spmv(*a_, ones, b);
    if (norm2(b) == 0.0) return true;
    std::vector<double> x;
    try {
      x = run(b, false);
    } catch (const SolverError&) {
      return false;
    }
    for (double v : x)
      if (!std::isfinite(v)) return false;
    return relative_residual(*a_, x, b) <= kLuProbeTolerance;
  }

  std::vector<double> run(std::span<const double> b, bool transpose) const {
    if (b.size() != n_) throw ConfigError("LU solve: dimension mismatch");
    if (n_ == 0) return {};
    if (umf_) {
      std::vector<double> x(n_);
      double control[UMFPACK_CONTROL];
      umfpack_di_defaults(control);
      double info[UMFPACK_INFO];
      const CsrMatrix& a = *a_;
      const int status =
          umfpack_di_solve(transpose ? UMFPACK_A : UMFPACK_At, a.row_offsets.data(),
                           a.column_indices.data(), a.values.data(), x.data(), b.data(),
                           umf_.get(), control, info);
      if (status != UMFPACK_OK)
        throw SolverError("LU solve failed (status " + std::to_string(status) + ")");
      return x;
    }
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x = transpose ? Eigen::VectorXd(eigen_->transpose().solve(rhs))
                                  : Eigen::VectorXd(eigen_->solve(rhs));
    return {x.data(), x.data() + x.size()};
  }

  // The factorisation references the caller's matrix, which must outlive it.
  const CsrMatrix* a_;
  std::size_t n_;
  LuBackend backend_ = LuBackend::Eigen;
  std::unique_ptr<void, UmfDeleter> umf_;
  EigenMatrix eigen_matrix_;
  std::unique_ptr<EigenLu> eigen_;
};

/// Direct solve. Decoupled identity rows are eliminated first; the result is
/// identical to factoring the full matrix.
inline SolveReport direct_solve(const CsrMatrix& a, std::span<const double> b) {
  const auto start = std::chrono::steady_clock::now();
  const ReducedSystem red = reduce_identity_rows(a, b);
  const LuFactorization lu(red.matrix);
  SolveReport rep;
  rep.solution = red.prolong_field(lu.solve(red.rhs));
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.method = SolveMethod::Direct;
  rep.iterations = 0;
  rep.relative_residual = relative_residual(a, rep.solution, b);
  rep.converged = true;
  return rep;
}

} // namespace phifd
