#pragma once

// Executable replay of the density-invariance argument on l^p sequence
// spaces with the core E = finitely supported sequences:
//
//   1. a biorthogonal system {m_n}, {x'_n} inside a window M,
//   2. finitely supported approximants z_n in the kernels of x'_1..x'_{n-1}
//      with ||z_n - m_n|| <= 2^(1-2n) eps min{1, c/||T||},
//   3. the near-isometry A : z_n -> m_n and the two-sided transfer of
//      ||Tz||/||z|| through it,
//   4. the four concluding bounds for Gamma, tau, Delta and nabla.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opquant/operators.hpp"
#include "opquant/seqspace.hpp"

namespace opquant {

/// Tolerance for the biorthogonality identities and kernel memberships.
inline constexpr double biorthogonal_tolerance = 1e-10;
/// Slack allowed on the inequalities checked after the construction.
inline constexpr double inequality_slack = 1e-9;
/// Slack used where a strict inequality is tested at the boundary.
inline constexpr double strict_slack = 1e-12;

struct BiorthogonalSystem {
  std::vector<TailVector> vectors;             // m_1, m_2, ...
  std::vector<LinearFunctional> functionals;   // x'_1, x'_2, ...
  std::optional<Subspace> source;              // empty: coordinate window of X
  SpaceConfig space;
  std::vector<bool> used_fallback;             // m_n came from the random fallback

  [[nodiscard]] std::size_t size() const noexcept { return vectors.size(); }
  /// x'_1..x'_{n-1}: the functionals whose kernels contain m_n (n is 1-based).
  [[nodiscard]] std::span<const LinearFunctional> kernel_stack(std::size_t n) const;
  /// W = span{m_n}.
  [[nodiscard]] Subspace span() const;
};

/// Largest deviations from the biorthogonality identities.
struct BiorthogonalDefects {
  double max_kernel_pairing = 0.0;   // |x'_i(m_n)|, i < n
  double max_unit_defect = 0.0;      // ||m_n|| - 1, ||x'_n|| - 1, x'_n(m_n) - 1
  bool independent = false;          // Gram of {m_n} positive definite

  [[nodiscard]] bool ok(double tol = biorthogonal_tolerance) const noexcept {
    return independent && max_kernel_pairing <= tol && max_unit_defect <= tol;
  }
};

BiorthogonalDefects check_biorthogonal(const BiorthogonalSystem& system);

/// Builds count elements inside M. m_1 is the normalized first basis vector;
/// every later m_n is the next unused basis vector pushed into the kernels of
/// x'_1..x'_{n-1}, with a seeded random vector of M as fallback.
BiorthogonalSystem build_biorthogonal(const Subspace& M, std::size_t count, SpaceConfig space,
                                      std::uint64_t seed);

/// Same construction in the coordinate window span{e_1..e_count} of X.
BiorthogonalSystem build_biorthogonal(std::size_t count, SpaceConfig space, std::uint64_t seed);

struct CoefficientBound {
  bool holds = true;
  double w_norm = 0.0;
  std::vector<double> margins;  // 2^(i-1) ||w|| - |a_i|
};

/// Checks |a_i| <= 2^(i-1) ||sum a_i m_i||.
CoefficientBound check_coefficient_bound(const BiorthogonalSystem& system,
                                         std::span<const double> w_coeffs);

struct CoreApproximation {
  BiorthogonalSystem system;
  std::vector<TailVector> z;                   // finitely supported
  double epsilon = 0.0;
  double c = 0.0;
  double T_norm = 0.0;
  std::vector<double> allowed;                 // 2^(1-2n) eps min{1, c/||T||}
  std::vector<double> budgets;                 // realized ||z_n - m_n||
  std::vector<std::size_t> truncation_index;

  /// eps min{1, c/||T||}
  [[nodiscard]] double scale() const noexcept;
  /// L = span{z_n}.
  [[nodiscard]] Subspace span() const;
  /// (z, Az) for z = sum a_i z_i.
  [[nodiscard]] std::pair<TailVector, TailVector> combine(std::span<const double> coeffs) const;
};

CoreApproximation build_core_approximants(const BiorthogonalSystem& system, const Operator& T,
                                          double epsilon, double c);

/// Largest |x'_i(z_n)| over i < n.
double max_core_kernel_pairing(const CoreApproximation& ca);

struct NearIsometryCheck {
  bool distance_holds = true;
  bool norm_bounds_hold = true;
  double distance = 0.0;   // ||z - Az||
  double z_norm = 0.0;
  double Az_norm = 0.0;
  double scale = 0.0;      // eps min{1, c/||T||}
};

NearIsometryCheck verify_near_isometry(const CoreApproximation& ca,
                                       std::span<const double> z_coeffs);

struct TransferCheck {
  bool lower_transfer_holds = true;
  bool upper_transfer_holds = true;
  double ratio_z = 0.0;       // ||Tz|| / ||z||
  double ratio_Az = 0.0;      // ||TAz|| / ||Az||
  double lower_bound = 0.0;   // (ratio_Az - eps c) / (1 + eps)
  double upper_bound = 0.0;   // (ratio_Az + eps c) / (1 - eps)
};

TransferCheck verify_transfer_bounds(const CoreApproximation& ca, const Operator& T,
                                     std::span<const double> z_coeffs);

/// Finitely supported element of the kernel intersection near m.
struct KernelApproximation {
  TailVector e;
  double distance = 0.0;
  std::size_t truncation_index = 0;
  double max_pairing = 0.0;
  bool reached = false;
};

/// Truncates m at J and corrects it back into the kernels using truncated
/// representers, doubling J until ||e - m|| <= tol (l^2 only).
KernelApproximation approximate_in_kernels(const TailVector& m,
                                           std::span<const LinearFunctional> functionals,
                                           double tol);

struct DenseIntersectionReport {
  std::size_t samples = 0;
  double tol = 0.0;
  double max_distance = 0.0;
  double max_pairing = 0.0;
  std::size_t max_truncation_index = 0;
  bool passed = false;
};

DenseIntersectionReport check_dense_intersection(std::span<const LinearFunctional> functionals,
                                                 std::size_t samples, double tol,
                                                 std::uint64_t seed);

enum class ProofPart { gamma, tau, delta, nabla };

std::string_view to_string(ProofPart part) noexcept;
std::optional<ProofPart> parse_part(std::string_view s) noexcept;

struct BoundCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool is_upper = true;   // measured <= bound, otherwise measured >= bound
  double slack = 0.0;     // signed distance to the bound, >= 0 when satisfied
  bool holds = true;
};

struct CaseOptions {
  std::uint64_t seed = 0;
  std::size_t inner_dim = 0;        // 0: ceil(dim M / 2), used by parts c and d
  std::size_t random_subbases = 100;
};

struct CaseReport {
  ProofPart part = ProofPart::gamma;
  double c = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  std::size_t inner_dim = 0;
  Subspace witness_M;
  Subspace constructed_L;
  std::vector<std::pair<std::string, double>> measured;
  std::vector<BoundCheck> checks;
  std::size_t tested_subspaces = 0;
  std::size_t qualifying_subspaces = 0;
  bool passed = false;
};

CaseReport run_invariance_case(const Operator& T, ProofPart part, const Subspace& witness_M,
                               double epsilon, double delta, CaseOptions opts = {});

}  // namespace opquant
