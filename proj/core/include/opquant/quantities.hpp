#pragma once

// Finite-dimensional analogues of the operational quantities
//
//   Gamma(T) = inf_M ||T|_M||            Delta(T) = sup_M Gamma(T|_M)
//   tau(T)   = sup_M inf_{m in S_M} ||Tm||  nabla(T) = inf_M tau(T|_M)
//
// where M ranges over k-dimensional (inner) or K-dimensional (outer)
// subspaces of the N-dimensional coordinate window. Three evaluation routes:
// singular values of the N-truncation, exhaustive coordinate subsets for
// diagonal operators, and a seeded Grassmannian search for anything else.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "opquant/operators.hpp"
#include "opquant/seqspace.hpp"

namespace opquant {

enum class Quantity { gamma, delta, tau, nabla };
enum class Method { svd_oracle, subset_oracle, grassmann_search };

std::string_view to_string(Quantity q) noexcept;
std::string_view to_string(Method m) noexcept;
std::optional<Quantity> parse_quantity(std::string_view s) noexcept;
std::optional<Method> parse_method(std::string_view s) noexcept;

/// inf-type quantities (Gamma, nabla) are certified from above by a search.
constexpr bool is_infimum_type(Quantity q) noexcept {
  return q == Quantity::gamma || q == Quantity::nabla;
}

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

struct QuantityEstimate {
  Quantity quantity = Quantity::gamma;
  double value = 0.0;
  std::size_t k = 1;
  std::size_t K = 1;
  std::size_t N = 1;
  Method method = Method::svd_oracle;
  Bracket bracket;
  std::uint64_t seed = 0;
  /// Optimal coordinate index set (1-based) for the subset oracle: the outer
  /// set for Delta/nabla, the inner set for Gamma/tau.
  std::vector<std::size_t> witness;
};

struct Dimensions {
  std::size_t N = 1;
  std::size_t k = 1;
  std::size_t K = 1;
};

struct SearchOptions {
  std::size_t restarts = 64;
  std::uint64_t seed = 0;
};

/// Singular values in descending order.
std::vector<double> svd_oracle(const Eigen::MatrixXd& A);

QuantityEstimate gamma_k(const Operator& T, std::size_t N, std::size_t k, Method method,
                         SearchOptions opts = {});
QuantityEstimate tau_k(const Operator& T, std::size_t N, std::size_t k, Method method,
                       SearchOptions opts = {});
QuantityEstimate delta_kK(const Operator& T, std::size_t N, std::size_t k, std::size_t K,
                          Method method, SearchOptions opts = {});
QuantityEstimate nabla_kK(const Operator& T, std::size_t N, std::size_t k, std::size_t K,
                          Method method, SearchOptions opts = {});

/// Dispatches on the quantity; K is ignored for Gamma and tau.
QuantityEstimate estimate(Quantity q, const Operator& T, Dimensions dims, Method method,
                          SearchOptions opts = {});

enum class Objective { min_restricted_norm, max_min_modulus };

struct SearchResult {
  double value;
  Subspace basis;
};

/// Searches k-dimensional subspaces of the N-window for the extremal
/// restricted norm / minimum modulus of the N-truncation. Deterministic in
/// `seed`; the returned basis is orthonormal.
SearchResult grassmann_search(Objective objective, const Operator& T, std::size_t N,
                              std::size_t k, std::size_t restarts, std::uint64_t seed);

struct LimitEstimate {
  std::vector<QuantityEstimate> sequence;
  double extrapolated = 0.0;
  bool converged = false;
};

/// Threshold on the spread of the last three schedule values.
inline constexpr double convergence_threshold = 1e-6;

LimitEstimate limit_estimate(const Operator& T, Quantity q, std::span<const Dimensions> schedule,
                             Method method, SearchOptions opts = {});

}  // namespace opquant
