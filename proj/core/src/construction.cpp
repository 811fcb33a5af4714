#include "opquant/construction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "opquant/error.hpp"

namespace opquant {

namespace {

constexpr double degenerate_projection = 1e-8;
constexpr std::size_t fallback_attempts = 16;
constexpr std::size_t max_truncation_index = std::size_t{1} << 14;

void require_l2(SpaceConfig space, const char* what) {
  if (space.p != Exponent::two) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " is defined for p = 2 only");
  }
}

TailVector difference(const TailVector& a, const TailVector& b) {
  const double coeffs[] = {1.0, -1.0};
  const TailVector vectors[] = {a, b};
  return linear_combine(coeffs, vectors);
}

TailVector combine_prefix(std::span<const double> coeffs, std::span<const TailVector> vectors) {
  if (coeffs.empty() ||
      std::all_of(coeffs.begin(), coeffs.end(), [](double a) { return a == 0.0; })) {
    return TailVector{};
  }
  return linear_combine(coeffs, vectors.first(coeffs.size()));
}

// Moves v into the kernels of x'_1..x'_{n-1} along span{m_1..m_{n-1}}. The
// pairing matrix x'_j(m_k) is unit lower triangular, so forward substitution
// suffices; a second sweep removes rounding residue.
TailVector push_into_kernels(TailVector v, const BiorthogonalSystem& sys,
                             const Eigen::MatrixXd& pairings) {
  const std::size_t n = sys.size();
  if (n == 0) return v;
  for (int sweep = 0; sweep < 2; ++sweep) {
    std::vector<double> beta(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double b = pairing(sys.functionals[j], v);
      for (std::size_t k = 0; k < j; ++k) {
        b -= pairings(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * beta[k];
      }
      beta[j] = b;
    }
    std::vector<double> coeffs{1.0};
    std::vector<TailVector> vectors{v};
    for (std::size_t k = 0; k < n; ++k) {
      coeffs.push_back(-beta[k]);
      vectors.push_back(sys.vectors[k]);
    }
    v = linear_combine(coeffs, vectors);
  }
  return v;
}

BiorthogonalSystem build_in_window(const std::vector<TailVector>& window,
                                   std::optional<Subspace> source, std::size_t count,
                                   SpaceConfig space, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::bad_dimensions, "count must be >= 1");
  if (count > window.size()) {
    throw Error(ErrorCode::exhausted_subspace,
                "window of dimension " + std::to_string(window.size()) + " cannot hold " +
                    std::to_string(count) + " biorthogonal elements");
  }
  if (space.p != Exponent::two &&
      std::any_of(window.begin(), window.end(), [](const TailVector& v) { return v.has_tail(); })) {
    throw Error(ErrorCode::unsupported_tail,
                "p in {1, inf} requires a window spanned by finitely supported vectors");
  }

  BiorthogonalSystem sys;
  sys.source = std::move(source);
  sys.space = space;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd pairings = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count),
                                                   static_cast<Eigen::Index>(count));

  auto admissible = [&](const TailVector& candidate) -> std::optional<TailVector> {
    const double scale = norm(candidate, space);
    if (scale == 0.0) return std::nullopt;
    TailVector v = push_into_kernels(candidate, sys, pairings);
    if (norm(v, space) < degenerate_projection * scale) return std::nullopt;
    return v;
  };

  std::size_t next = 0;
  for (std::size_t n = 0; n < count; ++n) {
    std::optional<TailVector> v;
    bool fallback = false;
    if (next < window.size()) v = admissible(window[next++]);
    for (std::size_t attempt = 0; !v && attempt < fallback_attempts; ++attempt) {
      fallback = true;
      std::vector<double> coeffs(window.size());
      for (auto& a : coeffs) a = gauss(rng);
      v = admissible(linear_combine(coeffs, window));
    }
    if (!v) {
      throw Error(ErrorCode::exhausted_subspace,
                  "no admissible vector left in the window at step " + std::to_string(n + 1));
    }
    TailVector m = v->scaled(1.0 / norm(*v, space));
    LinearFunctional x = norming_functional(m, space);
    sys.vectors.push_back(std::move(m));
    sys.functionals.push_back(std::move(x));
    sys.used_fallback.push_back(fallback);
    for (std::size_t j = 0; j <= n; ++j) {
      for (std::size_t k = 0; k <= n; ++k) {
        if (j == n || k == n) {
          pairings(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
              pairing(sys.functionals[j], sys.vectors[k]);
        }
      }
    }
  }

  const BiorthogonalDefects defects = check_biorthogonal(sys);
  if (!defects.ok()) {
    throw Error(ErrorCode::degenerate_basis,
                "window too ill-conditioned for a biorthogonal system at tolerance 1e-10");
  }
  return sys;
}

// Pushes a finitely supported vector into the kernels of the functionals
// using the J-truncations of their representers, so the result stays
// finitely supported.
std::optional<TailVector> correct_finite(const TailVector& head,
                                         std::span<const LinearFunctional> functionals,
                                         std::size_t J) {
  if (functionals.empty()) return head;
  const auto n = static_cast<Eigen::Index>(functionals.size());
  std::vector<TailVector> g;
  g.reserve(functionals.size());
  for (const auto& f : functionals) g.push_back(truncate(f.representer(), J).head);
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      G(i, k) = pairing(functionals[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(k)]);
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) return std::nullopt;
  TailVector v = head;
  for (int sweep = 0; sweep < 2; ++sweep) {
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs(i) = pairing(functionals[static_cast<std::size_t>(i)], v);
    if (rhs.isZero(0.0)) break;
    const Eigen::VectorXd beta = lu.solve(rhs);
    std::vector<double> coeffs{1.0};
    std::vector<TailVector> vectors{v};
    for (Eigen::Index k = 0; k < n; ++k) {
      coeffs.push_back(-beta(k));
      vectors.push_back(g[static_cast<std::size_t>(k)]);
    }
    v = linear_combine(coeffs, vectors);
  }
  return v;
}

double max_pairing(std::span<const LinearFunctional> functionals, const TailVector& v) {
  double m = 0.0;
  for (const auto& f : functionals) m = std::max(m, std::abs(pairing(f, v)));
  return m;
}

BoundCheck make_check(std::string name, double measured, double bound, bool is_upper) {
  BoundCheck b;
  b.name = std::move(name);
  b.measured = measured;
  b.bound = bound;
  b.is_upper = is_upper;
  b.slack = is_upper ? bound - measured : measured - bound;
  b.holds = b.slack >= -inequality_slack;
  return b;
}

}  // namespace

std::span<const LinearFunctional> BiorthogonalSystem::kernel_stack(std::size_t n) const {
  if (n == 0 || n > functionals.size()) {
    throw Error(ErrorCode::bad_dimensions, "kernel_stack index out of range");
  }
  return std::span<const LinearFunctional>(functionals).first(n - 1);
}

Subspace BiorthogonalSystem::span() const { return Subspace(vectors, space); }

BiorthogonalDefects check_biorthogonal(const BiorthogonalSystem& system) {
  BiorthogonalDefects d;
  for (std::size_t n = 0; n < system.size(); ++n) {
    const auto& m = system.vectors[n];
    const auto& x = system.functionals[n];
    for (std::size_t i = 0; i < n; ++i) {
      d.max_kernel_pairing = std::max(d.max_kernel_pairing, std::abs(pairing(system.functionals[i], m)));
    }
    d.max_unit_defect = std::max({d.max_unit_defect, std::abs(norm(m, system.space) - 1.0),
                                  std::abs(x.dual_norm() - 1.0), std::abs(pairing(x, m) - 1.0)});
  }
  d.independent = system.size() > 0 && is_positive_definite(gram(system.vectors));
  return d;
}

BiorthogonalSystem build_biorthogonal(const Subspace& M, std::size_t count, SpaceConfig space,
                                      std::uint64_t seed) {
  return build_in_window(M.basis(), M, count, space, seed);
}

BiorthogonalSystem build_biorthogonal(std::size_t count, SpaceConfig space, std::uint64_t seed) {
  std::vector<TailVector> window;
  for (std::size_t j = 1; j <= count; ++j) window.push_back(TailVector::unit(j));
  return build_in_window(window, std::nullopt, count, space, seed);
}

CoefficientBound check_coefficient_bound(const BiorthogonalSystem& system,
                                         std::span<const double> w_coeffs) {
  if (w_coeffs.size() > system.size()) {
    throw Error(ErrorCode::dimension_mismatch, "more coefficients than system elements");
  }
  CoefficientBound out;
  out.w_norm = norm(combine_prefix(w_coeffs, system.vectors), system.space);
  for (std::size_t i = 0; i < w_coeffs.size(); ++i) {
    const double margin = std::ldexp(out.w_norm, static_cast<int>(i)) - std::abs(w_coeffs[i]);
    out.margins.push_back(margin);
    if (margin < -inequality_slack) out.holds = false;
  }
  return out;
}

double CoreApproximation::scale() const noexcept {
  const double ratio = T_norm > 0.0 ? std::min(1.0, c / T_norm) : 1.0;
  return epsilon * ratio;
}

Subspace CoreApproximation::span() const { return Subspace(z, system.space); }

std::pair<TailVector, TailVector> CoreApproximation::combine(std::span<const double> coeffs) const {
  if (coeffs.size() > z.size()) {
    throw Error(ErrorCode::dimension_mismatch, "more coefficients than approximants");
  }
  return {combine_prefix(coeffs, z), combine_prefix(coeffs, system.vectors)};
}

CoreApproximation build_core_approximants(const BiorthogonalSystem& system, const Operator& T,
                                          double epsilon, double c) {
  require_l2(system.space, "build_core_approximants");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "epsilon must lie in (0,1)");
  }
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::invalid_argument, "c must be > 0");

  CoreApproximation ca;
  ca.system = system;
  ca.epsilon = epsilon;
  ca.c = c;
  ca.T_norm = operator_norm(T, system.space);
  const double scale = ca.scale();

  for (std::size_t n = 1; n <= system.size(); ++n) {
    const TailVector& m = system.vectors[n - 1];
    const auto stack = system.kernel_stack(n);
    const double allowed = std::ldexp(scale, 1 - 2 * static_cast<int>(n));
    ca.allowed.push_back(allowed);
    if (!m.has_tail()) {
      // m_n already lies in E
      ca.z.push_back(m);
      ca.budgets.push_back(0.0);
      ca.truncation_index.push_back(m.prefix_length());
      continue;
    }
    std::size_t J = m.prefix_length();
    while (truncate(m, J).remainder_norm > 0.5 * allowed) {
      if (++J > max_truncation_index) {
        throw Error(ErrorCode::budget_infeasible,
                    "no truncation meets budget " + std::to_string(allowed));
      }
    }
    std::optional<TailVector> accepted;
    double distance = 0.0;
    for (; J <= max_truncation_index; J = std::max(2 * J, J + 1)) {
      const auto z = correct_finite(truncate(m, J).head, stack, J);
      if (!z) continue;
      distance = norm(difference(*z, m), system.space);
      if (distance <= allowed && max_pairing(stack, *z) <= biorthogonal_tolerance) {
        accepted = *z;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::budget_infeasible,
                  "kernel correction could not meet budget " + std::to_string(allowed) +
                      " at step " + std::to_string(n));
    }
    ca.z.push_back(std::move(*accepted));
    ca.budgets.push_back(distance);
    ca.truncation_index.push_back(J);
  }
  return ca;
}

double max_core_kernel_pairing(const CoreApproximation& ca) {
  double m = 0.0;
  for (std::size_t n = 1; n <= ca.z.size(); ++n) {
    m = std::max(m, max_pairing(ca.system.kernel_stack(n), ca.z[n - 1]));
  }
  return m;
}

NearIsometryCheck verify_near_isometry(const CoreApproximation& ca,
                                       std::span<const double> z_coeffs) {
  const auto [z, Az] = ca.combine(z_coeffs);
  const SpaceConfig space = ca.system.space;
  NearIsometryCheck out;
  out.distance = norm(difference(z, Az), space);
  out.z_norm = norm(z, space);
  out.Az_norm = norm(Az, space);
  out.scale = ca.scale();
  const double e = ca.epsilon;
  const double k = out.scale;
  const double d = out.distance;
  const double a = out.Az_norm;
  if (a > 0.0) {
    out.distance_holds = d < k * a + strict_slack;
    // (1-e)|Az| <= (1-k)|Az| < |Az| - d <= |z| <= |Az| + d < (1+k)|Az| <= (1+e)|Az|
    out.norm_bounds_hold = (1.0 - e) * a <= (1.0 - k) * a + strict_slack &&
                    (1.0 - k) * a < a - d + strict_slack &&
                    a - d <= out.z_norm + inequality_slack &&
                    out.z_norm <= a + d + inequality_slack &&
                    a + d < (1.0 + k) * a + strict_slack &&
                    (1.0 - e) * a <= out.z_norm + inequality_slack &&
                    out.z_norm <= (1.0 + e) * a + inequality_slack;
  } else {
    out.distance_holds = d <= inequality_slack;
    out.norm_bounds_hold = out.z_norm <= inequality_slack;
  }
  return out;
}

TransferCheck verify_transfer_bounds(const CoreApproximation& ca, const Operator& T,
                                     std::span<const double> z_coeffs) {
  const auto [z, Az] = ca.combine(z_coeffs);
  const SpaceConfig space = ca.system.space;
  const double zn = norm(z, space);
  const double an = norm(Az, space);
  if (zn == 0.0 || an == 0.0) throw Error(ErrorCode::zero_vector, "transfer bounds need z != 0");
  TransferCheck out;
  out.ratio_z = norm(apply(T, z), space) / zn;
  out.ratio_Az = norm(apply(T, Az), space) / an;
  const double ec = ca.epsilon * ca.c;
  out.lower_bound = (out.ratio_Az - ec) / (1.0 + ca.epsilon);
  out.upper_bound = (out.ratio_Az + ec) / (1.0 - ca.epsilon);
  out.lower_transfer_holds = out.ratio_z > out.lower_bound - inequality_slack;
  out.upper_transfer_holds = out.ratio_z < out.upper_bound + inequality_slack;
  return out;
}

KernelApproximation approximate_in_kernels(const TailVector& m,
                                           std::span<const LinearFunctional> functionals,
                                           double tol) {
  for (const auto& f : functionals) require_l2(f.space(), "approximate_in_kernels");
  KernelApproximation out;
  std::size_t J = m.prefix_length();
  for (; J <= max_truncation_index; J = std::max(2 * J, J + 1)) {
    const auto e = correct_finite(truncate(m, J).head, functionals, J);
    if (!e) continue;
    out.e = *e;
    out.truncation_index = J;
    out.distance = norm(difference(*e, m), SpaceConfig{});
    out.max_pairing = max_pairing(functionals, *e);
    if (out.distance <= tol && out.max_pairing <= biorthogonal_tolerance) {
      out.reached = true;
      break;
    }
  }
  return out;
}

DenseIntersectionReport check_dense_intersection(std::span<const LinearFunctional> functionals,
                                                 std::size_t samples, double tol,
                                                 std::uint64_t seed) {
  for (const auto& f : functionals) require_l2(f.space(), "check_dense_intersection");
  double ratio = 0.0;
  if (!functionals.empty()) {
    std::vector<TailVector> reps;
    for (const auto& f : functionals) {
      reps.push_back(f.representer());
      if (ratio == 0.0 && f.representer().has_tail()) ratio = f.representer().tail_ratio();
    }
    if (!is_positive_definite(gram(reps))) {
      throw Error(ErrorCode::degenerate_functionals, "functional representers are dependent");
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> prefix_len(0, 5);
  std::uniform_int_distribution<std::size_t> period(1, 3);
  if (ratio == 0.0) ratio = std::uniform_real_distribution<double>(0.1, 0.8)(rng);

  DenseIntersectionReport report;
  report.samples = samples;
  report.tol = tol;
  report.passed = true;
  for (std::size_t s = 0; s < samples; ++s) {
    TailVector m;
    while (m.is_zero()) {
      std::vector<double> prefix(prefix_len(rng));
      for (auto& x : prefix) x = coord(rng);
      std::vector<double> coeffs(period(rng));
      for (auto& x : coeffs) x = coord(rng);
      m = project_into_kernels(TailVector(std::move(prefix), std::move(coeffs), ratio),
                               functionals, SpaceConfig{});
    }
    const KernelApproximation k = approximate_in_kernels(m, functionals, tol);
    report.max_distance = std::max(report.max_distance, k.distance);
    report.max_pairing = std::max(report.max_pairing, k.max_pairing);
    report.max_truncation_index = std::max(report.max_truncation_index, k.truncation_index);
    report.passed = report.passed && k.reached;
  }
  return report;
}

std::string_view to_string(ProofPart part) noexcept {
  switch (part) {
    case ProofPart::gamma: return "a";
    case ProofPart::tau: return "b";
    case ProofPart::delta: return "c";
    case ProofPart::nabla: return "d";
  }
  return "a";
}

std::optional<ProofPart> parse_part(std::string_view s) noexcept {
  if (s == "a" || s == "Gamma") return ProofPart::gamma;
  if (s == "b" || s == "Tau") return ProofPart::tau;
  if (s == "c" || s == "Delta") return ProofPart::delta;
  if (s == "d" || s == "Nabla") return ProofPart::nabla;
  return std::nullopt;
}

CaseReport run_invariance_case(const Operator& T, ProofPart part, const Subspace& witness_M,
                               double epsilon, double delta, CaseOptions opts) {
  require_l2(witness_M.ambient(), "run_invariance_case");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "epsilon must lie in (0,1)");
  }
  if (!(delta > 0.0)) throw Error(ErrorCode::invalid_argument, "delta must be > 0");
  if (witness_M.within_finite_support()) {
    throw Error(ErrorCode::invalid_witness, "witness subspace lies inside the core E");
  }
  const std::size_t K = witness_M.dimension();
  const std::size_t k = opts.inner_dim == 0 ? (K + 1) / 2 : opts.inner_dim;
  if (k < 1 || k > K) throw Error(ErrorCode::bad_dimensions, "inner_dim must lie in 1..dim M");

  // Restricted singular values of T on M, descending.
  const std::vector<double> sv_M = restricted_singular_values(T, witness_M);
  const double grow = (1.0 + epsilon) / (1.0 - epsilon);
  const double shrink = (1.0 - epsilon) / (1.0 + epsilon);

  double c = 0.0;
  double premise = 0.0;
  std::string premise_name;
  bool premise_upper = true;
  switch (part) {
    case ProofPart::gamma:
      premise = sv_M.front();
      c = premise * (1.0 + delta);
      premise_name = "restricted_norm_T_M";
      break;
    case ProofPart::tau:
      premise = sv_M.back();
      c = premise * (1.0 - delta);
      premise_name = "min_modulus_T_M";
      premise_upper = false;
      break;
    case ProofPart::delta:
      premise = sv_M[K - k];
      c = premise * (1.0 - delta);
      premise_name = "gamma_k_T_M";
      premise_upper = false;
      break;
    case ProofPart::nabla:
      premise = sv_M[k - 1];
      c = premise * (1.0 + delta);
      premise_name = "tau_k_T_M";
      break;
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::invalid_witness,
                "derived constant c = " + std::to_string(c) + " is not positive for part " +
                    std::string(to_string(part)));
  }

  const BiorthogonalSystem system = build_biorthogonal(witness_M, K, SpaceConfig{}, opts.seed);
  const CoreApproximation ca = build_core_approximants(system, T, epsilon, c);
  const Subspace L = ca.span();

  CaseReport report{part,      c, delta, epsilon, k, witness_M, L, {}, {}, 0, 0, false};
  report.measured.emplace_back("operator_norm", ca.T_norm);
  report.measured.emplace_back("c", c);
  report.measured.emplace_back(premise_name, premise);

  const BiorthogonalDefects defects = check_biorthogonal(system);
  report.checks.push_back(make_check("kernel_pairing", defects.max_kernel_pairing,
                                     biorthogonal_tolerance, true));
  report.checks.push_back(
      make_check("unit_defect", defects.max_unit_defect, biorthogonal_tolerance, true));
  double budget_ratio = 0.0;
  for (std::size_t n = 0; n < ca.z.size(); ++n) {
    budget_ratio = std::max(budget_ratio, ca.budgets[n] / ca.allowed[n]);
  }
  report.checks.push_back(make_check("budget_ratio", budget_ratio, 1.0, true));
  report.checks.push_back(
      make_check("core_kernel_pairing", max_core_kernel_pairing(ca), biorthogonal_tolerance, true));
  report.checks.push_back(make_check(premise_name, premise, c, premise_upper));

  const std::vector<double> sv_L = restricted_singular_values(T, L);
  switch (part) {
    case ProofPart::gamma:
      report.checks.push_back(make_check("restricted_norm_T_L", sv_L.front(), grow * c, true));
      break;
    case ProofPart::tau:
      report.checks.push_back(make_check("min_modulus_T_L", sv_L.back(), shrink * c, false));
      break;
    case ProofPart::delta:
      report.checks.push_back(make_check("gamma_k_T_L", sv_L[K - k], shrink * c, false));
      break;
    case ProofPart::nabla:
      report.checks.push_back(make_check("tau_k_T_L", sv_L[k - 1], grow * c, true));
      break;
  }

  if (part == ProofPart::delta || part == ProofPart::nabla) {
    // Sub-bases V of L paired with A V in W = M.
    const bool sup_part = part == ProofPart::delta;
    double extreme = sup_part ? std::numeric_limits<double>::infinity() : 0.0;
    auto test = [&](const Eigen::MatrixXd& coeffs) {
      std::vector<TailVector> vb;
      std::vector<TailVector> ab;
      for (Eigen::Index r = 0; r < coeffs.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(coeffs.cols()));
        for (Eigen::Index j = 0; j < coeffs.cols(); ++j) row[static_cast<std::size_t>(j)] = coeffs(r, j);
        vb.push_back(linear_combine(row, ca.z));
        ab.push_back(linear_combine(row, system.vectors));
      }
      try {
        const Subspace V(vb);
        const Subspace AV(ab);
        ++report.tested_subspaces;
        if (sup_part) {
          if (restricted_norm(T, AV) > c) {
            ++report.qualifying_subspaces;
            extreme = std::min(extreme, restricted_norm(T, V));
          }
        } else if (restricted_min_modulus(T, AV) < c) {
          ++report.qualifying_subspaces;
          extreme = std::max(extreme, restricted_min_modulus(T, V));
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate_basis) throw;
      }
    };
    if (K <= 12) {
      for (std::size_t mask = 1; mask < (std::size_t{1} << K); ++mask) {
        const auto dim = static_cast<Eigen::Index>(std::popcount(mask));
        Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(K));
        Eigen::Index r = 0;
        for (std::size_t j = 0; j < K; ++j) {
          if (mask & (std::size_t{1} << j)) coeffs(r++, static_cast<Eigen::Index>(j)) = 1.0;
        }
        test(coeffs);
      }
    }
    std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<std::size_t> dim_dist(1, K);
    for (std::size_t s = 0; s < opts.random_subbases; ++s) {
      const auto dim = static_cast<Eigen::Index>(dim_dist(rng));
      Eigen::MatrixXd coeffs(dim, static_cast<Eigen::Index>(K));
      for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
        for (Eigen::Index j = 0; j < coeffs.cols(); ++j) coeffs(i, j) = gauss(rng);
      }
      test(coeffs);
    }
    report.measured.emplace_back("tested_subspaces", static_cast<double>(report.tested_subspaces));
    report.measured.emplace_back("qualifying_subspaces",
                                 static_cast<double>(report.qualifying_subspaces));
    if (report.qualifying_subspaces > 0) {
      report.checks.push_back(sup_part
                                  ? make_check("min_restricted_norm_T_V", extreme, shrink * c, false)
                                  : make_check("max_min_modulus_T_V", extreme, grow * c, true));
    } else {
      report.checks.push_back(make_check("qualifying_subspaces", 0.0, 1.0, false));
    }
  }

  report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const BoundCheck& b) { return b.holds; });
  return report;
}

}  // namespace opquant
