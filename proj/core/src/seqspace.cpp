#include "opquant/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "opquant/error.hpp"

namespace opquant {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::incompatible_tails: return "IncompatibleTails";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::zero_vector: return "ZeroVector";
    case ErrorCode::unsupported_tail: return "UnsupportedTail";
    case ErrorCode::degenerate_functionals: return "DegenerateFunctionals";
    case ErrorCode::degenerate_basis: return "DegenerateBasis";
    case ErrorCode::unsupported_operator: return "UnsupportedOperator";
    case ErrorCode::bad_dimensions: return "BadDimensions";
    case ErrorCode::exhausted_subspace: return "ExhaustedSubspace";
    case ErrorCode::budget_infeasible: return "BudgetInfeasible";
    case ErrorCode::invalid_witness: return "InvalidWitness";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

Exponent dual(Exponent p) noexcept {
  switch (p) {
    case Exponent::one: return Exponent::infinity;
    case Exponent::infinity: return Exponent::one;
    case Exponent::two: break;
  }
  return Exponent::two;
}

namespace {

double clean_zero(double x) { return x == 0.0 ? 0.0 : x; }

}  // namespace

TailParts expand(const TailVector& v, std::size_t J, std::size_t L) {
  if (v.has_tail() && L % v.period() != 0) {
    throw Error(ErrorCode::invalid_argument, "expanded period must be a multiple of the tail period");
  }
  TailParts a;
  a.prefix = v.prefix();
  a.prefix.resize(std::max(J, v.prefix_length()), 0.0);
  a.tail = v.has_tail();
  a.ratio = v.tail_ratio();
  if (!a.tail) {
    a.coeffs.assign(L, 0.0);
    return a;
  }
  const auto& c = v.tail_coeffs();
  const std::size_t P = c.size();
  const std::size_t J0 = v.prefix_length();
  for (std::size_t j = J0; j < a.prefix.size(); ++j) {
    const std::size_t t = j - J0;
    a.prefix[j] = c[t % P] * std::pow(a.ratio, static_cast<double>(t));
  }
  const std::size_t shift = a.prefix.size() - J0;
  const double scale = std::pow(a.ratio, static_cast<double>(shift));
  a.coeffs.resize(L);
  for (std::size_t s = 0; s < L; ++s) a.coeffs[s] = c[(s + shift) % P] * scale;
  return a;
}

TailVector::TailVector(std::vector<double> prefix, std::vector<double> tail_coeffs,
                       double tail_ratio)
    : prefix_(std::move(prefix)), coeffs_(std::move(tail_coeffs)), ratio_(tail_ratio) {
  if (coeffs_.empty()) coeffs_.assign(1, 0.0);
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(prefix_.begin(), prefix_.end(), finite) ||
      !std::all_of(coeffs_.begin(), coeffs_.end(), finite) || !std::isfinite(ratio_)) {
    throw Error(ErrorCode::invalid_argument, "TailVector entries must be finite");
  }
  bool zero_tail = std::all_of(coeffs_.begin(), coeffs_.end(), [](double x) { return x == 0.0; });
  if (!zero_tail && ratio_ == 0.0) {
    // only the t = 0 slot survives (0^0 = 1)
    prefix_.push_back(coeffs_.front());
    zero_tail = true;
  }
  if (!zero_tail && !(std::abs(ratio_) < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "tail ratio must satisfy |r| < 1");
  }
  for (auto& x : prefix_) x = clean_zero(x);
  if (zero_tail) {
    coeffs_.assign(1, 0.0);
    ratio_ = 0.0;
    while (!prefix_.empty() && prefix_.back() == 0.0) prefix_.pop_back();
    return;
  }
  for (auto& x : coeffs_) x = clean_zero(x);
  const std::size_t P = coeffs_.size();
  for (std::size_t d = 1; d < P; ++d) {
    if (P % d != 0) continue;
    bool repeats = true;
    for (std::size_t s = d; s < P && repeats; ++s) repeats = coeffs_[s] == coeffs_[s % d];
    if (repeats) {
      coeffs_.resize(d);
      break;
    }
  }
}

TailVector TailVector::unit(std::size_t index) {
  if (index == 0) throw Error(ErrorCode::invalid_argument, "coordinates are 1-based");
  std::vector<double> p(index, 0.0);
  p.back() = 1.0;
  return TailVector(std::move(p));
}

TailVector TailVector::geometric(std::size_t start_index, std::vector<double> coeffs,
                                 double ratio) {
  if (start_index == 0) throw Error(ErrorCode::invalid_argument, "coordinates are 1-based");
  return TailVector(std::vector<double>(start_index - 1, 0.0), std::move(coeffs), ratio);
}

bool TailVector::has_tail() const noexcept {
  return std::any_of(coeffs_.begin(), coeffs_.end(), [](double x) { return x != 0.0; });
}

double TailVector::at(std::size_t j) const {
  if (j == 0) throw Error(ErrorCode::invalid_argument, "coordinates are 1-based");
  if (j <= prefix_.size()) return prefix_[j - 1];
  if (!has_tail()) return 0.0;
  const std::size_t t = j - prefix_.size() - 1;
  return coeffs_[t % coeffs_.size()] * std::pow(ratio_, static_cast<double>(t));
}

TailVector TailVector::scaled(double alpha) const {
  std::vector<double> p = prefix_;
  std::vector<double> c = coeffs_;
  for (auto& x : p) x *= alpha;
  for (auto& x : c) x *= alpha;
  return TailVector(std::move(p), std::move(c), ratio_);
}

TailVector canonical(const TailVector& v) {
  return TailVector(v.prefix(), v.tail_coeffs(), v.tail_ratio());
}

TailVector linear_combine(std::span<const double> coeffs, std::span<const TailVector> vectors) {
  if (coeffs.size() != vectors.size() || coeffs.empty()) {
    throw Error(ErrorCode::dimension_mismatch, "linear_combine needs equal nonzero lengths");
  }
  std::size_t J = 0;
  std::size_t L = 1;
  bool any_tail = false;
  double ratio = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    J = std::max(J, v.prefix_length());
    if (coeffs[i] == 0.0 || !v.has_tail()) continue;
    if (any_tail && v.tail_ratio() != ratio) {
      throw Error(ErrorCode::incompatible_tails, "cannot combine tails with ratios " +
                                                     std::to_string(ratio) + " and " +
                                                     std::to_string(v.tail_ratio()));
    }
    any_tail = true;
    ratio = v.tail_ratio();
    L = std::lcm(L, v.period());
  }
  std::vector<double> prefix(J, 0.0);
  std::vector<double> tail(L, 0.0);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (coeffs[i] == 0.0) continue;
    const TailParts a = expand(vectors[i], J, L);
    for (std::size_t j = 0; j < J; ++j) prefix[j] += coeffs[i] * a.prefix[j];
    if (a.tail) {
      for (std::size_t s = 0; s < L; ++s) tail[s] += coeffs[i] * a.coeffs[s];
    }
  }
  return TailVector(std::move(prefix), std::move(tail), any_tail ? ratio : 0.0);
}

double inner_product(const TailVector& u, const TailVector& v) {
  const std::size_t J = std::max(u.prefix_length(), v.prefix_length());
  const bool both = u.has_tail() && v.has_tail();
  const std::size_t L = both ? std::lcm(u.period(), v.period()) : 1;
  const TailParts a = expand(u, J, both ? L : u.period());
  const TailParts b = expand(v, J, both ? L : v.period());
  double sum = 0.0;
  for (std::size_t j = 0; j < J; ++j) sum += a.prefix[j] * b.prefix[j];
  if (both) {
    const double rho = a.ratio * b.ratio;
    double tail = 0.0;
    double power = 1.0;
    for (std::size_t s = 0; s < L; ++s) {
      tail += a.coeffs[s] * b.coeffs[s] * power;
      power *= rho;
    }
    sum += tail / (1.0 - power);
  }
  return sum;
}

double norm(const TailVector& v, SpaceConfig space) {
  switch (space.p) {
    case Exponent::two:
      return std::sqrt(std::max(0.0, inner_product(v, v)));
    case Exponent::one: {
      double s = 0.0;
      for (double x : v.prefix()) s += std::abs(x);
      if (v.has_tail()) {
        const double r = std::abs(v.tail_ratio());
        double t = 0.0;
        double power = 1.0;
        for (double c : v.tail_coeffs()) {
          t += std::abs(c) * power;
          power *= r;
        }
        s += t / (1.0 - power);
      }
      return s;
    }
    case Exponent::infinity: {
      double m = 0.0;
      for (double x : v.prefix()) m = std::max(m, std::abs(x));
      if (v.has_tail()) {
        const double r = std::abs(v.tail_ratio());
        double power = 1.0;
        for (double c : v.tail_coeffs()) {
          m = std::max(m, std::abs(c) * power);
          power *= r;
        }
      }
      return m;
    }
  }
  return 0.0;
}

LinearFunctional::LinearFunctional(TailVector representer, SpaceConfig space)
    : representer_(std::move(representer)),
      space_(space),
      dual_norm_(norm(representer_, SpaceConfig{dual(space.p)})) {}

double pairing(const LinearFunctional& f, const TailVector& v) {
  return inner_product(f.representer(), v);
}

LinearFunctional norming_functional(const TailVector& v, SpaceConfig space) {
  if (v.is_zero()) throw Error(ErrorCode::zero_vector, "norming functional of zero");
  if (space.p == Exponent::two) return LinearFunctional(v.scaled(1.0 / norm(v, space)), space);
  if (v.has_tail()) {
    throw Error(ErrorCode::unsupported_tail,
                "norming functionals for p in {1, inf} need finitely supported vectors");
  }
  const auto& x = v.prefix();
  std::vector<double> rep(x.size(), 0.0);
  if (space.p == Exponent::one) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      rep[j] = x[j] > 0.0 ? 1.0 : (x[j] < 0.0 ? -1.0 : 0.0);
    }
  } else {
    std::size_t best = 0;
    for (std::size_t j = 1; j < x.size(); ++j) {
      if (std::abs(x[j]) > std::abs(x[best])) best = j;
    }
    rep[best] = x[best] > 0.0 ? 1.0 : -1.0;
  }
  return LinearFunctional(TailVector(std::move(rep)), space);
}

TailVector project_into_kernels(const TailVector& v, std::span<const LinearFunctional> functionals,
                                SpaceConfig space) {
  if (space.p != Exponent::two) {
    throw Error(ErrorCode::invalid_argument, "kernel projection is defined for p = 2 only");
  }
  if (functionals.empty()) return v;
  std::vector<TailVector> reps;
  reps.reserve(functionals.size());
  for (const auto& f : functionals) reps.push_back(f.representer());
  const Eigen::MatrixXd g = gram(reps);
  if (!is_positive_definite(g)) {
    throw Error(ErrorCode::degenerate_functionals, "functional representers are dependent");
  }
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(reps.size()));
  for (std::size_t i = 0; i < reps.size(); ++i) {
    rhs(static_cast<Eigen::Index>(i)) = inner_product(reps[i], v);
  }
  const Eigen::VectorXd a = g.ldlt().solve(rhs);
  std::vector<double> coeffs{1.0};
  std::vector<TailVector> vectors{v};
  for (std::size_t i = 0; i < reps.size(); ++i) {
    coeffs.push_back(-a(static_cast<Eigen::Index>(i)));
    vectors.push_back(reps[i]);
  }
  return linear_combine(coeffs, vectors);
}

Truncation truncate(const TailVector& v, std::size_t J, SpaceConfig space) {
  const auto& prefix = v.prefix();
  if (J <= prefix.size()) {
    std::vector<double> head(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(J));
    std::vector<double> rest(prefix.size(), 0.0);
    std::copy(prefix.begin() + static_cast<std::ptrdiff_t>(J), prefix.end(),
              rest.begin() + static_cast<std::ptrdiff_t>(J));
    const TailVector remainder(std::move(rest), v.tail_coeffs(), v.tail_ratio());
    return {TailVector(std::move(head)), norm(remainder, space)};
  }
  // Walk the tail until index J. Below the normal range r^t can get stuck at
  // the smallest denormal, so the walk stops there and the rest is dropped.
  const auto& c = v.tail_coeffs();
  const double r = v.tail_ratio();
  const std::size_t shift = J - prefix.size();
  std::vector<double> head = prefix;
  double power = 1.0;
  std::size_t t = 0;
  const bool tail = v.has_tail();
  for (; tail && t < shift && std::abs(power) >= std::numeric_limits<double>::min(); ++t) {
    head.push_back(c[t % c.size()] * power);
    power *= r;
  }
  if (!tail) return {TailVector(std::move(head)), 0.0};
  if (t < shift) power = std::pow(r, static_cast<double>(shift));
  std::vector<double> rotated(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) rotated[i] = c[(shift + i) % c.size()] * power;
  const TailVector remainder({}, std::move(rotated), r);
  return {TailVector(std::move(head)), norm(remainder, space)};
}

Eigen::MatrixXd gram(std::span<const TailVector> basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      g(i, j) = g(j, i) = inner_product(basis[static_cast<std::size_t>(i)],
                                        basis[static_cast<std::size_t>(j)]);
    }
  }
  return g;
}

bool is_positive_definite(const Eigen::MatrixXd& g) {
  if (g.rows() == 0) return false;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().maxCoeff();
  return largest > 0.0 && eig.eigenvalues().minCoeff() > gram_rank_tolerance * largest;
}

Subspace::Subspace(std::vector<TailVector> basis, SpaceConfig ambient)
    : basis_(std::move(basis)), ambient_(ambient) {
  if (basis_.empty()) throw Error(ErrorCode::degenerate_basis, "subspace basis is empty");
  if (!is_positive_definite(gram(basis_))) {
    throw Error(ErrorCode::degenerate_basis, "subspace basis is not linearly independent");
  }
}

bool Subspace::within_finite_support() const noexcept {
  return std::none_of(basis_.begin(), basis_.end(),
                      [](const TailVector& v) { return v.has_tail(); });
}

}  // namespace opquant
