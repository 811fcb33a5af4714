#pragma once

// Structured bounded operators on l^p that map TailVectors to TailVectors.

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "opquant/seqspace.hpp"

namespace opquant {

/// Eventually periodic weight sequence: `prefix` on indices 1..B, then
/// `periodic` repeated forever.
struct WeightSequence {
  std::vector<double> prefix;
  std::vector<double> periodic{0.0};

  /// Weight at the 1-based index j.
  [[nodiscard]] double at(std::size_t j) const;
  /// sup_j |w_j| (every periodic value recurs infinitely often).
  [[nodiscard]] double sup_abs() const;
  /// sup over j > from of |w_j|.
  [[nodiscard]] double sup_abs_after(std::size_t from) const;
};

struct Diagonal {
  WeightSequence values;
};

/// e_j -> w_j e_{j+1}
struct WeightedShift {
  WeightSequence weights;
};

/// Dense block acting on indices 1..B plus a diagonal.
struct FiniteRankPlus {
  Eigen::MatrixXd block;
  WeightSequence diagonal;
};

/// N x N matrix acting on the first N coordinates. Oracle-only.
struct DenseMatrix {
  Eigen::MatrixXd matrix;
};

class Operator {
 public:
  using Variant = std::variant<Diagonal, WeightedShift, FiniteRankPlus, DenseMatrix>;

  explicit Operator(Variant payload);

  static Operator identity();
  static Operator zero();
  static Operator diagonal(std::vector<double> prefix, std::vector<double> periodic);
  static Operator shift(std::vector<double> prefix, std::vector<double> periodic);
  static Operator finite_rank_plus(Eigen::MatrixXd block, std::vector<double> prefix,
                                   std::vector<double> periodic);
  static Operator dense(Eigen::MatrixXd matrix);

  [[nodiscard]] const Variant& payload() const noexcept { return payload_; }
  [[nodiscard]] std::string_view kind() const noexcept;

  /// Diagonal entries |d_1..d_N| when the operator is diagonal in the
  /// coordinate basis up to index N; empty otherwise.
  [[nodiscard]] std::vector<double> diagonal_entries(std::size_t N) const;

 private:
  Variant payload_;
};

TailVector apply(const Operator& T, const TailVector& v);

struct NormBracket {
  double lower = 0.0;
  double upper = 0.0;
};

NormBracket operator_norm_bracket(const Operator& T, SpaceConfig space);
double operator_norm(const Operator& T, SpaceConfig space);

/// N x N compression with entries <T e_j, e_i>.
Eigen::MatrixXd truncate_operator(const Operator& T, std::size_t N);

/// Gram data of a restriction T|_M (p = 2).
struct RestrictedOperatorData {
  Subspace subspace;
  Eigen::MatrixXd gram_M;
  Eigen::MatrixXd gram_TM;
};

RestrictedOperatorData restrict_to(const Operator& T, const Subspace& M);

/// Singular values of T|_M in descending order, from the generalized
/// eigenproblem gram_TM x = lambda gram_M x.
std::vector<double> restricted_singular_values(const RestrictedOperatorData& data);
std::vector<double> restricted_singular_values(const Operator& T, const Subspace& M);

/// ||T|_M||
double restricted_norm(const Operator& T, const Subspace& M);
/// inf over unit m in M of ||T m||
double restricted_min_modulus(const Operator& T, const Subspace& M);

}  // namespace opquant
