#include "opquant/quantities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "opquant/error.hpp"

namespace opquant {

std::string_view to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::gamma: return "Gamma";
    case Quantity::delta: return "Delta";
    case Quantity::tau: return "Tau";
    case Quantity::nabla: return "Nabla";
  }
  return "Gamma";
}

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::svd_oracle: return "svd_oracle";
    case Method::subset_oracle: return "subset_oracle";
    case Method::grassmann_search: return "grassmann_search";
  }
  return "svd_oracle";
}

std::optional<Quantity> parse_quantity(std::string_view s) noexcept {
  if (s == "Gamma" || s == "G") return Quantity::gamma;
  if (s == "Delta" || s == "D") return Quantity::delta;
  if (s == "Tau" || s == "T") return Quantity::tau;
  if (s == "Nabla" || s == "N") return Quantity::nabla;
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view s) noexcept {
  if (s == "svd_oracle") return Method::svd_oracle;
  if (s == "subset_oracle") return Method::subset_oracle;
  if (s == "grassmann_search") return Method::grassmann_search;
  return std::nullopt;
}

namespace {

constexpr double subset_enumeration_limit = 5e7;

void check_inner(std::size_t N, std::size_t k) {
  if (k < 1 || k > N) {
    throw Error(ErrorCode::bad_dimensions,
                "need 1 <= k <= N, got k=" + std::to_string(k) + ", N=" + std::to_string(N));
  }
}

void check_outer(std::size_t N, std::size_t k, std::size_t K) {
  if (k < 1 || k > K || K > N) {
    throw Error(ErrorCode::bad_dimensions, "need 1 <= k <= K <= N, got k=" + std::to_string(k) +
                                               ", K=" + std::to_string(K) +
                                               ", N=" + std::to_string(N));
  }
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Visits every k-subset of {0..n-1} in lexicographic order.
template <class Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
  if (binomial(n, k) > subset_enumeration_limit) {
    throw Error(ErrorCode::bad_dimensions, "subset enumeration C(" + std::to_string(n) + "," +
                                               std::to_string(k) + ") is too large");
  }
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    visit(std::as_const(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<double> abs_diagonal(const Operator& T, std::size_t N) {
  std::vector<double> d = T.diagonal_entries(N);
  if (d.empty()) {
    throw Error(ErrorCode::unsupported_operator,
                "subset oracle needs an operator diagonal in the coordinate basis, got " +
                    std::string(T.kind()));
  }
  for (auto& x : d) x = std::abs(x);
  return d;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> out(idx);
  for (auto& i : out) ++i;
  return out;
}

// j-th smallest (1-based) among the values of d on idx.
double order_statistic(const std::vector<double>& d, const std::vector<std::size_t>& idx,
                       std::size_t j) {
  std::vector<double> vals;
  vals.reserve(idx.size());
  for (std::size_t i : idx) vals.push_back(d[i]);
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(j - 1), vals.end());
  return vals[j - 1];
}

struct SubsetOptimum {
  double value;
  std::vector<std::size_t> witness;
};

// Exhaustive search over `size`-subsets. `better(a, b)` is a strict order so
// the lexicographically first optimum is kept.
template <class Score, class Better>
SubsetOptimum subset_search(std::size_t N, std::size_t size, Score score, Better better) {
  SubsetOptimum best{0.0, {}};
  for_each_subset(N, size, [&](const std::vector<std::size_t>& idx) {
    const double v = score(idx);
    if (best.witness.empty() || better(v, best.value)) best = {v, one_based(idx)};
  });
  return best;
}

SubsetOptimum subset_value(Quantity q, const std::vector<double>& d, Dimensions dims) {
  const auto lt = std::less<>();
  const auto gt = std::greater<>();
  switch (q) {
    case Quantity::gamma:
      return subset_search(
          dims.N, dims.k,
          [&](const auto& idx) { return order_statistic(d, idx, idx.size()); }, lt);
    case Quantity::tau:
      return subset_search(
          dims.N, dims.k, [&](const auto& idx) { return order_statistic(d, idx, 1); }, gt);
    case Quantity::delta:
      // inner Gamma_k of the restriction to S is its k-th smallest entry
      return subset_search(
          dims.N, dims.K, [&](const auto& idx) { return order_statistic(d, idx, dims.k); }, gt);
    case Quantity::nabla:
      // inner tau_k of the restriction to S is its k-th largest entry
      return subset_search(
          dims.N, dims.K,
          [&](const auto& idx) { return order_statistic(d, idx, dims.K - dims.k + 1); }, lt);
  }
  return {};
}

double svd_value(Quantity q, const std::vector<double>& sv, Dimensions dims) {
  switch (q) {
    case Quantity::gamma: return sv[dims.N - dims.k];
    case Quantity::tau: return sv[dims.k - 1];
    case Quantity::delta: return sv[dims.K - dims.k];
    case Quantity::nabla: return sv[dims.N - dims.K + dims.k - 1];
  }
  return 0.0;
}

Eigen::MatrixXd random_orthonormal(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = gauss(rng);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
}

// Objective on ascending Ritz singular values of a dim-dimensional subspace.
using RitzObjective = std::function<double(const Eigen::VectorXd&)>;

struct Candidate {
  double value = 0.0;
  Eigen::MatrixXd basis;
};

constexpr std::size_t max_refinements = 300;
constexpr double stall_tolerance = 1e-15;

// Rotates Q onto its Ritz vectors for A; returns ascending singular values.
Eigen::VectorXd ritz(const Eigen::MatrixXd& A, Eigen::MatrixXd& Q) {
  const Eigen::MatrixXd B = Q.transpose() * A * Q;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (B + B.transpose()));
  Q = (Q * eig.eigenvectors()).eval();
  return eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

// Alternating refinement from one random start: the worst Ritz direction is
// swapped for the extremal eigenvector of A on the orthogonal complement of
// the remaining directions, followed by Rayleigh-Ritz on the enlarged space.
Candidate refine(const Eigen::MatrixXd& A, std::size_t dim, bool minimize,
                 const RitzObjective& objective, std::mt19937_64& rng) {
  const auto N = static_cast<std::size_t>(A.rows());
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd Q = random_orthonormal(N, dim, rng);
  Candidate best{objective(ritz(A, Q)), Q};
  if (dim == N) return best;
  for (std::size_t iter = 0; iter < max_refinements; ++iter) {
    const Eigen::Index worst = minimize ? d - 1 : 0;
    Eigen::MatrixXd others(Q.rows(), d - 1);
    for (Eigen::Index j = 0, c = 0; j < d; ++j) {
      if (j != worst) others.col(c++) = Q.col(j);
    }
    Eigen::MatrixXd complement;
    if (others.cols() == 0) {
      complement = Eigen::MatrixXd::Identity(Q.rows(), Q.rows());
    } else {
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(others);
      const Eigen::MatrixXd full = qr.householderQ();
      complement = full.rightCols(Q.rows() - others.cols());
    }
    const Eigen::MatrixXd Ac = complement.transpose() * A * complement;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (Ac + Ac.transpose()));
    Eigen::VectorXd v = complement * eig.eigenvectors().col(minimize ? 0 : Ac.rows() - 1);
    v -= Q * (Q.transpose() * v);
    v -= Q * (Q.transpose() * v);
    const double vn = v.norm();
    if (vn < 1e-12) break;  // already contained in the current subspace

    Eigen::MatrixXd Z(Q.rows(), d + 1);
    Z << Q, v / vn;
    const Eigen::MatrixXd B = Z.transpose() * A * Z;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(0.5 * (B + B.transpose()));
    const Eigen::MatrixXd keep =
        minimize ? rr.eigenvectors().leftCols(d) : rr.eigenvectors().rightCols(d);
    Q = Z * keep;
    const Eigen::HouseholderQR<Eigen::MatrixXd> reortho(Q);
    Q = reortho.householderQ() * Eigen::MatrixXd::Identity(Q.rows(), d);
    const double value = objective(ritz(A, Q));
    const bool improved = minimize ? value < best.value : value > best.value;
    const double step = std::abs(value - best.value);
    if (improved) best = {value, Q};
    if (step <= stall_tolerance * std::max(1.0, std::abs(best.value))) break;
  }
  return best;
}

Candidate search_restarts(const Eigen::MatrixXd& A, std::size_t dim, bool minimize,
                          const RitzObjective& objective, std::size_t restarts,
                          std::uint64_t seed) {
  if (restarts == 0) throw Error(ErrorCode::invalid_argument, "restarts must be >= 1");
  Candidate best;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    Candidate c = refine(A, dim, minimize, objective, rng);
    if (r == 0 || (minimize ? c.value < best.value : c.value > best.value)) best = std::move(c);
  }
  return best;
}

Subspace to_subspace(const Eigen::MatrixXd& Q) {
  std::vector<TailVector> basis;
  for (Eigen::Index j = 0; j < Q.cols(); ++j) {
    basis.emplace_back(std::vector<double>(Q.col(j).data(), Q.col(j).data() + Q.rows()));
  }
  return Subspace(std::move(basis));
}

QuantityEstimate make_estimate(Quantity q, Dimensions dims, Method method, std::uint64_t seed) {
  QuantityEstimate e;
  e.quantity = q;
  e.k = dims.k;
  e.K = dims.K;
  e.N = dims.N;
  e.method = method;
  e.seed = seed;
  return e;
}

}  // namespace

std::vector<double> svd_oracle(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return {};
  // JacobiSVD rescales its input, which can move diagonal entries by an ulp.
  const Eigen::Index n = std::min(A.rows(), A.cols());
  bool diagonal = true;
  for (Eigen::Index j = 0; j < A.cols() && diagonal; ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      if (i != j && A(i, j) != 0.0) {
        diagonal = false;
        break;
      }
    }
  }
  if (diagonal) {
    std::vector<double> s(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = std::abs(A(i, i));
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const Eigen::VectorXd& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

SearchResult grassmann_search(Objective objective, const Operator& T, std::size_t N,
                              std::size_t k, std::size_t restarts, std::uint64_t seed) {
  check_inner(N, k);
  const Eigen::MatrixXd TN = truncate_operator(T, N);
  const Eigen::MatrixXd A = TN.transpose() * TN;
  const bool minimize = objective == Objective::min_restricted_norm;
  const RitzObjective f = minimize
                              ? RitzObjective([](const Eigen::VectorXd& s) { return s.maxCoeff(); })
                              : RitzObjective([](const Eigen::VectorXd& s) { return s.minCoeff(); });
  const Candidate best = search_restarts(A, k, minimize, f, restarts, seed);
  Subspace basis = to_subspace(best.basis);
  const Operator dense = Operator::dense(TN);
  const double value =
      minimize ? restricted_norm(dense, basis) : restricted_min_modulus(dense, basis);
  return {value, std::move(basis)};
}

QuantityEstimate estimate(Quantity q, const Operator& T, Dimensions dims, Method method,
                          SearchOptions opts) {
  if (q == Quantity::gamma || q == Quantity::tau) {
    check_inner(dims.N, dims.k);
    dims.K = dims.k;
  } else {
    check_outer(dims.N, dims.k, dims.K);
  }
  QuantityEstimate e = make_estimate(q, dims, method, opts.seed);
  switch (method) {
    case Method::svd_oracle: {
      const std::vector<double> sv = svd_oracle(truncate_operator(T, dims.N));
      e.value = svd_value(q, sv, dims);
      e.bracket = {e.value, e.value};
      break;
    }
    case Method::subset_oracle: {
      const std::vector<double> d = abs_diagonal(T, dims.N);
      SubsetOptimum best = subset_value(q, d, dims);
      e.value = best.value;
      e.bracket = {e.value, e.value};
      e.witness = std::move(best.witness);
      break;
    }
    case Method::grassmann_search: {
      const Eigen::MatrixXd TN = truncate_operator(T, dims.N);
      const double top = svd_oracle(TN).front();
      if (q == Quantity::gamma || q == Quantity::tau) {
        const Objective obj =
            q == Quantity::gamma ? Objective::min_restricted_norm : Objective::max_min_modulus;
        e.value = grassmann_search(obj, T, dims.N, dims.k, opts.restarts, opts.seed).value;
      } else {
        // Outer search over K-dimensional M; the inner quantity of T|_M is an
        // exact order statistic of its Ritz singular values.
        const Eigen::MatrixXd A = TN.transpose() * TN;
        const std::size_t k = dims.k;
        const std::size_t K = dims.K;
        const bool minimize = q == Quantity::nabla;
        const RitzObjective f =
            minimize ? RitzObjective([=](const Eigen::VectorXd& s) {
              return s(static_cast<Eigen::Index>(K - k));
            })
                     : RitzObjective([=](const Eigen::VectorXd& s) {
                         return s(static_cast<Eigen::Index>(k - 1));
                       });
        e.value = search_restarts(A, K, minimize, f, opts.restarts, opts.seed).value;
      }
      e.bracket = is_infimum_type(q) ? Bracket{0.0, e.value} : Bracket{e.value, std::max(top, e.value)};
      break;
    }
  }
  return e;
}

QuantityEstimate gamma_k(const Operator& T, std::size_t N, std::size_t k, Method method,
                         SearchOptions opts) {
  return estimate(Quantity::gamma, T, {N, k, k}, method, opts);
}

QuantityEstimate tau_k(const Operator& T, std::size_t N, std::size_t k, Method method,
                       SearchOptions opts) {
  return estimate(Quantity::tau, T, {N, k, k}, method, opts);
}

QuantityEstimate delta_kK(const Operator& T, std::size_t N, std::size_t k, std::size_t K,
                          Method method, SearchOptions opts) {
  return estimate(Quantity::delta, T, {N, k, K}, method, opts);
}

QuantityEstimate nabla_kK(const Operator& T, std::size_t N, std::size_t k, std::size_t K,
                          Method method, SearchOptions opts) {
  return estimate(Quantity::nabla, T, {N, k, K}, method, opts);
}

LimitEstimate limit_estimate(const Operator& T, Quantity q, std::span<const Dimensions> schedule,
                             Method method, SearchOptions opts) {
  if (schedule.empty()) throw Error(ErrorCode::bad_dimensions, "schedule is empty");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const auto& a = schedule[i - 1];
    const auto& b = schedule[i];
    if (b.N < a.N || b.k < a.k || b.K < a.K) {
      throw Error(ErrorCode::bad_dimensions,
                  "schedule must be monotone in N, k, K (step " + std::to_string(i) + ")");
    }
  }
  LimitEstimate out;
  for (const auto& dims : schedule) out.sequence.push_back(estimate(q, T, dims, method, opts));
  out.extrapolated = out.sequence.back().value;
  if (out.sequence.size() >= 3) {
    const auto n = out.sequence.size();
    const double a = out.sequence[n - 3].value;
    const double b = out.sequence[n - 2].value;
    const double c = out.sequence[n - 1].value;
    out.converged = std::abs(a - b) < convergence_threshold &&
                    std::abs(b - c) < convergence_threshold &&
                    std::abs(a - c) < convergence_threshold;
  }
  return out;
}

}  // namespace opquant
