#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shadowlab/sdp.hpp"

namespace shadowlab {

/// Affine symmetric pencil A + sum xi_i B_i + sum eta_j C_j.
struct Pencil {
  Eigen::MatrixXd A;
  std::vector<Eigen::MatrixXd> B;  // one per ambient coordinate
  std::vector<Eigen::MatrixXd> C;  // one per lifted coordinate

  int dim() const { return static_cast<int>(A.rows()); }
  int n() const { return static_cast<int>(B.size()); }
  int m() const { return static_cast<int>(C.size()); }
  /// Throws on size mismatches or asymmetric matrices.
  void check() const;
};

/// Homogeneous pencil (A = 0) with the given ambient and lifted matrices.
Pencil conic_pencil(std::vector<Eigen::MatrixXd> B, std::vector<Eigen::MatrixXd> C = {});

Eigen::MatrixXd pencil_eval(const Pencil& p, const Eigen::VectorXd& xi, const Eigen::VectorXd& eta);
Eigen::MatrixXd pencil_eval(const Pencil& p, const Eigen::VectorXd& xi);

/// {xi : exists eta with pencil(xi, eta) >= 0}.
class Shadow {
 public:
  Shadow() = default;
  explicit Shadow(Pencil p);

  const Pencil& pencil() const { return pencil_; }
  int ambient_dim() const { return pencil_.n(); }
  int lifted_dim() const { return pencil_.m(); }
  bool is_cone() const { return is_cone_; }

 private:
  Pencil pencil_;
  bool is_cone_ = false;
};

enum class Membership { In, Out, Borderline };
std::string to_string(Membership m);

struct ShadowOptions {
  double box = 1e3;     // |eta_j| <= box keeps the membership SDP bounded
  double band = 1e-7;   // |margin| <= band is Borderline
  double strict_tol = 1e-7;
  SdpOptions sdp;
};

struct MembershipResult {
  Membership verdict = Membership::Borderline;
  /// max t with pencil(xi, eta) - t I >= 0 (capped at 1).
  double margin = 0.0;
  Eigen::VectorXd eta;
  /// Out: PSD Y on the pencil block with <pencil(xi, .), Y> < 0 (up to the eta box).
  Eigen::MatrixXd separator;
  SdpStatus status = SdpStatus::NumericalFailure;
};

MembershipResult shadow_contains(const Shadow& s, const Eigen::VectorXd& xi, const ShadowOptions& opt = {});

struct SupportResult {
  double value = 0.0;        // c'xi at the returned point
  double upper_bound = 0.0;  // primal bound on the maximum
  Eigen::VectorXd xi;
  Eigen::VectorXd eta;
  bool at_box = false;       // some coordinate sits on the box
  SdpStatus status = SdpStatus::NumericalFailure;
};

/// max c'xi over the shadow, all coordinates boxed by opt.box.
SupportResult support(const Shadow& s, const Eigen::VectorXd& c, const ShadowOptions& opt = {});

struct StrictPoint {
  Eigen::VectorXd xi;
  Eigen::VectorXd eta;
  double lambda = 0.0;
};

/// Point with pencil(xi, eta) >= lambda I, lambda > strict_tol (lambda capped
/// at 1, coordinates boxed); nullopt when none exists. Throws
/// NumericalFailureError when the solver gives no answer.
std::optional<StrictPoint> strict_point(const Shadow& s, const ShadowOptions& opt = {});

/// (<B, M_1>, ..., <B, M_n>) for a homogeneous pencil without lifted part.
Eigen::VectorXd dual_cone_point(const Pencil& cone, const Eigen::MatrixXd& B, double tol_psd = 1e-9);

struct DualMembership {
  bool in_dual = false;
  Eigen::MatrixXd B;        // in_dual: B >= 0, <B, M_i> = a_i, <B, N_j> = 0
  Eigen::VectorXd xi;       // !in_dual: cone point with a'xi < 0
  Eigen::VectorXd eta;
  double residual = 0.0;    // max equation residual or certificate residual
};

/// Raised when a construction needs strict feasibility and the pencil has none.
class NotStrictlyFeasibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Decides a in C* for the strictly feasible conic shadow C given by `cone`
/// (lifted matrices N_j allowed). With `center`, B is moved to the analytic
/// center of the feasible slice.
DualMembership dual_cone_member(const Pencil& cone, const Eigen::VectorXd& a, const ShadowOptions& opt = {},
                                bool center = false);

/// Maximizer of log det over {B >= 0 : <B, F_k> = c_k}, started from a
/// feasible B0. Returns B0 unchanged when B0 is singular.
Eigen::MatrixXd analytic_center(const Eigen::MatrixXd& B0, const std::vector<Eigen::MatrixXd>& F, int max_iter = 50);

/// Cone over {1} x K: new first coordinate takes A as its coefficient.
Shadow homogenize_shadow(const Shadow& s);
/// Image under xi -> T xi. T must have full row rank.
Shadow linear_image(const Shadow& s, const Eigen::MatrixXd& T);
Shadow intersect(const Shadow& a, const Shadow& b);
/// Closure of conv(K1 u K2), via the perspective construction. Both sets
/// should have nonempty interior.
Shadow convex_hull_union(const Shadow& a, const Shadow& b);

}  // namespace shadowlab
