#pragma once

// Exact arithmetic on sequence-space vectors whose support is infinite but
// whose tail is a periodically modulated geometric sequence.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace opquant {

enum class Exponent { one, two, infinity };

/// Ambient space X = Y = l^p.
struct SpaceConfig {
  Exponent p = Exponent::two;

  friend bool operator==(const SpaceConfig&, const SpaceConfig&) = default;
};

/// Conjugate exponent q with 1/p + 1/q = 1.
Exponent dual(Exponent p) noexcept;

/// Element of l^p: a finite prefix at indices 1..J followed by the tail
/// c[(j-J-1) mod P] * r^(j-J-1) for j > J.
///
/// Values are always stored in canonical form:
///  - a zero tail is stored as P = 1, c = {0}, r = 0 and the prefix carries no
///    trailing zeros;
///  - a tail with r = 0 is folded into the prefix;
///  - the period is the smallest one reproducing the coefficient pattern.
class TailVector {
 public:
  TailVector() = default;
  explicit TailVector(std::vector<double> prefix, std::vector<double> tail_coeffs = {0.0},
                      double tail_ratio = 0.0);

  /// Unit coordinate vector e_index (1-based).
  static TailVector unit(std::size_t index);
  /// Pure tail whose first nonzero slot sits at `start_index` (1-based).
  static TailVector geometric(std::size_t start_index, std::vector<double> coeffs, double ratio);

  [[nodiscard]] const std::vector<double>& prefix() const noexcept { return prefix_; }
  [[nodiscard]] const std::vector<double>& tail_coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] double tail_ratio() const noexcept { return ratio_; }
  [[nodiscard]] std::size_t period() const noexcept { return coeffs_.size(); }
  [[nodiscard]] std::size_t prefix_length() const noexcept { return prefix_.size(); }
  [[nodiscard]] bool has_tail() const noexcept;
  [[nodiscard]] bool is_zero() const noexcept { return prefix_.empty() && !has_tail(); }

  /// Coordinate at the 1-based index j.
  [[nodiscard]] double at(std::size_t j) const;

  [[nodiscard]] TailVector scaled(double alpha) const;

  friend bool operator==(const TailVector&, const TailVector&) = default;

 private:
  std::vector<double> prefix_;
  std::vector<double> coeffs_{0.0};
  double ratio_ = 0.0;
};

/// Raw (non-canonical) layout of a TailVector.
struct TailParts {
  std::vector<double> prefix;
  std::vector<double> coeffs;
  double ratio = 0.0;
  bool tail = false;
};

/// Re-expresses v with prefix length max(J, prefix_length) and tail period L,
/// which must be a multiple of v.period() when v has a tail.
TailParts expand(const TailVector& v, std::size_t J, std::size_t L);

/// Re-applies canonicalization. Construction already canonicalizes, so this is
/// the identity on every TailVector; kept for explicit normal-form checks.
TailVector canonical(const TailVector& v);

/// Exact linear combination; all nonzero tails must share one ratio.
TailVector linear_combine(std::span<const double> coeffs, std::span<const TailVector> vectors);

/// Sum_j u_j v_j in closed form.
double inner_product(const TailVector& u, const TailVector& v);

double norm(const TailVector& v, SpaceConfig space);

/// Continuous linear functional on l^p represented by an element of l^q.
class LinearFunctional {
 public:
  LinearFunctional(TailVector representer, SpaceConfig space);

  [[nodiscard]] const TailVector& representer() const noexcept { return representer_; }
  [[nodiscard]] double dual_norm() const noexcept { return dual_norm_; }
  [[nodiscard]] SpaceConfig space() const noexcept { return space_; }

 private:
  TailVector representer_;
  SpaceConfig space_;
  double dual_norm_;
};

double pairing(const LinearFunctional& f, const TailVector& v);

/// Functional f with ||f|| = 1 and f(v) = ||v||. For p in {1, inf} the
/// argument must be finitely supported.
LinearFunctional norming_functional(const TailVector& v, SpaceConfig space);

/// Orthogonal projection of v onto the intersection of the functionals'
/// kernels (l^2 only).
TailVector project_into_kernels(const TailVector& v, std::span<const LinearFunctional> functionals,
                                SpaceConfig space);

struct Truncation {
  TailVector head;          // agrees with v on indices <= J, zero after
  double remainder_norm;    // exact norm of v - head
};

Truncation truncate(const TailVector& v, std::size_t J, SpaceConfig space = {});

/// Gram matrix of l^2 inner products.
Eigen::MatrixXd gram(std::span<const TailVector> basis);

/// Finite ordered linearly independent basis spanning a window of X.
class Subspace {
 public:
  Subspace(std::vector<TailVector> basis, SpaceConfig ambient = {});

  [[nodiscard]] const std::vector<TailVector>& basis() const noexcept { return basis_; }
  [[nodiscard]] SpaceConfig ambient() const noexcept { return ambient_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return basis_.size(); }
  [[nodiscard]] bool within_finite_support() const noexcept;

 private:
  std::vector<TailVector> basis_;
  SpaceConfig ambient_;
};

/// Relative eigenvalue floor used for positive-definiteness of Gram matrices.
inline constexpr double gram_rank_tolerance = 1e-10;

/// True when the smallest eigenvalue exceeds gram_rank_tolerance * largest.
bool is_positive_definite(const Eigen::MatrixXd& g);

}  // namespace opquant
