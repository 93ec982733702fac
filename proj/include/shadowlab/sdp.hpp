#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shadowlab {

/// Trace inner product tr(AB) for symmetric A, B. Works for any scalar.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar inner(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("inner: dimension mismatch");
  return a.cwiseProduct(b.transpose()).sum();
}

/// Raised by operations that need a definite solver answer and did not get one.
class NumericalFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double min_eig(const Eigen::MatrixXd& a);
/// Symmetric PSD square root; eigenvalues down to -tol_psd are clipped to 0.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a, double tol_psd = 1e-9);
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a);

/// One stored entry of a symmetric block-diagonal matrix; row <= col.
/// An off-diagonal entry stands for both (row, col) and (col, row).
struct SymEntry {
  int block;
  int row;
  int col;
  double value;
};
using SparseSym = std::vector<SymEntry>;

/// Appends the upper triangle of a dense symmetric matrix as entries of `block`.
void append_dense(SparseSym& out, int block, const Eigen::MatrixXd& m, double drop = 0.0);
SparseSym from_dense(int block, const Eigen::MatrixXd& m);

using BlockMatrix = std::vector<Eigen::MatrixXd>;

enum class SdpSense { Minimize, Feasibility };
enum class SdpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };
std::string to_string(SdpStatus s);

/// Standard form over a block-diagonal PSD cone (size-1 blocks are LP variables):
///   primal  min <C,X>  s.t. <A_i,X> = b_i, X >= 0
///   dual    max b'y    s.t. S = C - sum y_i A_i >= 0
struct SdpProblem {
  std::vector<int> blocks;
  SparseSym C;
  std::vector<SparseSym> A;
  Eigen::VectorXd b;
  SdpSense sense = SdpSense::Minimize;

  int num_constraints() const { return static_cast<int>(A.size()); }
  void add_constraint(SparseSym a, double rhs);
  /// Validates entry indices against the block sizes.
  void check() const;
};

BlockMatrix to_blocks(const SparseSym& m, const std::vector<int>& blocks);
double inner(const SparseSym& a, const BlockMatrix& x);
Eigen::MatrixXd block_diag(const BlockMatrix& x);

struct SdpOptions {
  double tol_psd = 1e-9;
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 200;
  double infeasibility_ratio = 1e-8;  // tau/kappa threshold
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  BlockMatrix X;
  Eigen::VectorXd y;
  BlockMatrix S;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  /// Infeasible: y is a ray with b'y = 1 and sum y_i A_i <= 0, and this is
  /// lambda_max(sum y_i A_i). Unbounded: X is a ray with <C,X> = -1 and
  /// A(X) = 0, and this is max |A_i(X)|.
  double certificate_residual = 0.0;
  std::string message;
};

/// Homogeneous self-dual primal-dual interior point method (HKM direction,
/// Mehrotra predictor-corrector). Deterministic.
SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt = {});

}  // namespace shadowlab
