#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shadowlab/polynomial.hpp"
#include "shadowlab/rational.hpp"
#include "shadowlab/sdp.hpp"

namespace shadowlab {

/// h * (w' G w) with G >= 0: one term of a weighted sum of squares.
struct WeightedBlock {
  RationalPolynomial weight;
  std::vector<RationalPolynomial> basis;
};

/// Coordinates g_(b,i,j), i <= j, of block-diagonal Gram matrices, and the
/// linear map to coefficients of sum_b h_b w_b' G_b w_b.
struct GramSystem {
  std::vector<std::string> vars;
  std::vector<WeightedBlock> blocks;
  std::vector<Monomial> monomials;           // rows
  struct Coord {
    int block, i, j;
  };
  std::vector<Coord> coords;                 // columns
  RationalMatrix K;                          // coefficient of g in each monomial (off-diagonal entries doubled)

  std::vector<int> block_sizes() const;
  /// Exact coefficient vector of f over `monomials`; nullopt if f has a monomial outside.
  std::optional<RationalVector> coefficients(const RationalPolynomial& f) const;
  /// Moment/localizing matrices of a functional given by its values on `monomials`.
  std::vector<Eigen::MatrixXd> moment_matrices(const Eigen::VectorXd& lambda) const;
  /// Float Gram vector -> block matrices, and back.
  std::vector<Eigen::MatrixXd> to_blocks(const Eigen::VectorXd& g) const;
  std::vector<RationalMatrix> to_blocks(const RationalVector& g) const;
  Eigen::VectorXd to_coords(const std::vector<Eigen::MatrixXd>& G) const;
};

GramSystem build_gram_system(const std::vector<std::string>& vars, std::vector<WeightedBlock> blocks);

/// Exponents alpha with deg <= deg(f)/2 and 2 alpha in the Newton polytope of
/// f, pruned of monomials whose square can only be matched by a zero coefficient.
std::vector<Monomial> newton_basis(const RationalPolynomial& f);

/// Exact LP feasibility: is p in conv(points)? Bland-rule simplex over rationals.
bool in_convex_hull(const std::vector<std::vector<Rational>>& points, const std::vector<Rational>& p);

struct ExactGram {
  std::vector<RationalMatrix> gram;
  /// f = sum weight * h_block * (vector . w_block)^2
  struct Square {
    int block;
    Rational weight;
    RationalVector vector;
  };
  std::vector<Square> squares;
  std::int64_t denominator_bound = 0;
  bool used_kernel = false;
};

/// Rounds float Gram blocks (a near-feasible certificate of f) to rationals,
/// projects exactly onto the affine Gram constraints and checks PSD exactly.
/// Falls back to a face reduction through the numerical kernel when the
/// certificate sits on the boundary of the PSD cone.
std::optional<ExactGram> rationalize_gram(const GramSystem& sys, const RationalVector& f,
                                          const std::vector<Eigen::MatrixXd>& G,
                                          const std::vector<std::int64_t>& denominator_bounds = {1000000, 1000000000});

/// One face-reduction step: every block whose Gram matrix has a recognizable
/// rational kernel is replaced by the complementary combinations of its basis.
/// nullopt when no block shrinks.
std::optional<std::vector<WeightedBlock>> reduce_face(const GramSystem& sys, const std::vector<Eigen::MatrixXd>& G);

/// Exact expansion of sum weight * h * q^2 minus f.
RationalPolynomial certificate_residual(const GramSystem& sys, const ExactGram& cert, const RationalPolynomial& f);

}  // namespace shadowlab
