// Acceptance gate. Runs each criterion, prints one PASS/FAIL line per
// criterion and exits non-zero if any criterion fails.
//
//   acceptance --cli <opquant binary> --fixtures <dir> --work <dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "opquant/construction.hpp"
#include "opquant/error.hpp"
#include "opquant/quantities.hpp"
#include "support/generators.hpp"

using namespace opquant;
using opquant::testing::random_matrix;
using opquant::testing::random_ratio;
using opquant::testing::random_tail_vector;
using opquant::testing::random_window_basis;

namespace {

const SpaceConfig l2{Exponent::two};

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> body;
};

struct Paths {
  std::string cli;
  std::filesystem::path fixtures;
  std::filesystem::path work;
};

// Counts failed checks and keeps the first few descriptions.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) first_ += (first_.empty() ? "" : "; ") + what;
  }
  [[nodiscard]] Outcome outcome(const std::string& summary) const {
    std::ostringstream os;
    os << summary << ", " << checks_ << " checks, " << failures_ << " failed";
    if (!first_.empty()) os << " [" << first_ << "]";
    return {failures_ == 0, os.str()};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::string first_;
};

std::vector<double> random_coeffs(std::mt19937_64& rng, std::size_t len) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(len);
  for (auto& x : a) x = u(rng);
  return a;
}

std::vector<double> random_diagonal(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> d(n);
  for (auto& x : d) x = u(rng);
  return d;
}

Operator diagonal_window(std::vector<double> d) { return Operator::diagonal(std::move(d), {0.0}); }

Outcome biorthogonality() {
  std::mt19937_64 rng(101);
  Tally t;
  double worst = 0.0;
  for (int w = 0; w < 50; ++w) {
    const std::size_t dim = 2 + static_cast<std::size_t>(w % 7);
    const Subspace M(random_window_basis(rng, dim));
    const auto sys = build_biorthogonal(M, dim, l2, static_cast<std::uint64_t>(w));
    const auto d = check_biorthogonal(sys);
    worst = std::max({worst, d.max_kernel_pairing, d.max_unit_defect});
    t.check(d.ok(1e-10), "window " + std::to_string(w) + " identities");
    for (int s = 0; s < 1000; ++s) {
      const auto a = random_coeffs(rng, dim);
      t.check(check_coefficient_bound(sys, a).holds,
              "window " + std::to_string(w) + " coefficient bound");
    }
  }
  std::ostringstream os;
  os << "50 windows, max defect " << worst;
  return t.outcome(os.str());
}

Outcome construction() {
  std::mt19937_64 rng(102);
  Tally t;
  const std::vector<Operator> ops{Operator::diagonal({}, {1.0, 2.0}),
                                  Operator::shift({3.0}, {1.0, 0.5})};
  std::size_t systems = 0;
  for (double eps : {0.5, 0.1, 0.01}) {
    for (double c : {0.5, 1.0, 2.0}) {
      for (int s = 0; s < 10; ++s) {
        ++systems;
        const std::size_t dim = 2 + static_cast<std::size_t>(s % 7);
        const Subspace M(random_window_basis(rng, dim));
        const auto sys = build_biorthogonal(M, dim, l2, static_cast<std::uint64_t>(s));
        const Operator& T = ops[static_cast<std::size_t>(s) % ops.size()];
        const auto ca = build_core_approximants(sys, T, eps, c);
        std::ostringstream tag;
        tag << "eps=" << eps << " c=" << c << " system " << s;
        for (std::size_t n = 0; n < dim; ++n) {
          t.check(ca.budgets[n] <= ca.allowed[n], tag.str() + " budget");
          t.check(!ca.z[n].has_tail(), tag.str() + " finite support");
        }
        t.check(max_core_kernel_pairing(ca) <= biorthogonal_tolerance, tag.str() + " kernels");
        for (int k = 0; k < 1000; ++k) {
          const auto a = random_coeffs(rng, dim);
          const auto iso = verify_near_isometry(ca, a);
          t.check(iso.distance_holds && iso.norm_bounds_hold, tag.str() + " near-isometry");
          const auto tr = verify_transfer_bounds(ca, T, a);
          t.check(tr.lower_transfer_holds && tr.upper_transfer_holds, tag.str() + " transfer");
        }
      }
    }
  }
  return t.outcome(std::to_string(systems) + " systems");
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(103);
  Tally t;
  double worst = 0.0;
  for (int m = 0; m < 100; ++m) {
    const Operator T = Operator::dense(random_matrix(rng, 6));
    const auto s = svd_oracle(truncate_operator(T, 6));
    for (std::size_t k = 1; k <= 3; ++k) {
      const SearchOptions opts{64, static_cast<std::uint64_t>(m)};
      const double g = gamma_k(T, 6, k, Method::grassmann_search, opts).value;
      const double tau = tau_k(T, 6, k, Method::grassmann_search, opts).value;
      const double g_err = std::abs(g - s[6 - k]);
      const double t_err = std::abs(tau - s[k - 1]);
      worst = std::max({worst, g_err, t_err});
      t.check(g_err <= 1e-6, "matrix " + std::to_string(m) + " Gamma_" + std::to_string(k));
      t.check(t_err <= 1e-6, "matrix " + std::to_string(m) + " tau_" + std::to_string(k));
    }
  }
  for (int d = 0; d < 100; ++d) {
    const std::size_t N = 3 + static_cast<std::size_t>(d % 6);
    const Operator T = diagonal_window(random_diagonal(rng, N));
    for (std::size_t k = 1; k <= N; ++k) {
      for (std::size_t K = k; K <= N; ++K) {
        for (Quantity q : {Quantity::gamma, Quantity::tau, Quantity::delta, Quantity::nabla}) {
          const Dimensions dims{N, k, K};
          const double a = estimate(q, T, dims, Method::subset_oracle).value;
          const double b = estimate(q, T, dims, Method::svd_oracle).value;
          t.check(a == b, "diagonal " + std::to_string(d) + " " + std::string(to_string(q)));
        }
      }
    }
  }
  std::ostringstream os;
  os << "100 dense (max search error " << worst << "), 100 diagonals";
  return t.outcome(os.str());
}

Outcome structured_limits() {
  Tally t;
  const Operator alt = Operator::diagonal({}, {2.0, 1.0});
  std::vector<Dimensions> inner;
  std::vector<Dimensions> outer;
  for (std::size_t k = 1; k <= 6; ++k) {
    inner.push_back({16, k, k});
    outer.push_back({16, k, 2 * k});
  }
  const struct {
    Quantity q;
    const std::vector<Dimensions>* schedule;
    double limit;
  } cases[] = {{Quantity::gamma, &inner, 1.0},
               {Quantity::tau, &inner, 2.0},
               {Quantity::delta, &outer, 2.0},
               {Quantity::nabla, &outer, 1.0}};
  for (const auto& c : cases) {
    const std::string name(to_string(c.q));
    const auto exact = limit_estimate(alt, c.q, *c.schedule, Method::subset_oracle);
    for (const auto& e : exact.sequence) t.check(e.value == c.limit, name + " subset point");
    t.check(exact.extrapolated == c.limit && exact.converged, name + " subset limit");
    const auto svd = limit_estimate(alt, c.q, *c.schedule, Method::svd_oracle);
    for (const auto& e : svd.sequence) {
      t.check(std::abs(e.value - c.limit) <= 1e-9, name + " svd point");
    }
    t.check(std::abs(svd.extrapolated - c.limit) <= 1e-9, name + " svd limit");
  }

  std::vector<double> h(20);
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = 1.0 / static_cast<double>(j + 1);
  const Operator compact = diagonal_window(h);
  std::vector<Dimensions> schedule;
  for (std::size_t k = 1; k <= 10; ++k) schedule.push_back({2 * k, k, k});
  const auto g = limit_estimate(compact, Quantity::gamma, schedule, Method::svd_oracle);
  for (std::size_t i = 1; i < g.sequence.size(); ++i) {
    t.check(g.sequence[i].value < g.sequence[i - 1].value, "compact Gamma decreasing");
  }
  const double last = g.sequence.back().value;
  t.check(last < 0.1, "compact Gamma_10 below 0.1");
  std::ostringstream os;
  os << "alternating limits 1/2/2/1, compact Gamma_10 = " << last;
  return t.outcome(os.str());
}

// Literal chain: nabla_{k,K} <= tau_k <= Delta_{k,K} and nabla_{k,K} <= Gamma_k <= Delta_{k,K}.
// On N-windows the middle links tau_k <= Delta_{k,K} and nabla_{k,K} <= Gamma_k
// need K < 2k; for K >= 2k the same-run comparison is with tau_K and Gamma_K.
Outcome ordering_chain() {
  std::mt19937_64 rng(105);
  Tally t;
  const double slack = 1e-12;
  std::size_t literal_pairs = 0;
  std::size_t matched_pairs = 0;
  std::size_t literal_misses = 0;  // informational: literal middle links at K >= 2k
  for (int d = 0; d < 200; ++d) {
    const std::size_t N = 2 + static_cast<std::size_t>(d % 7);
    const Operator T = diagonal_window(random_diagonal(rng, N));
    for (Method m : {Method::subset_oracle, Method::svd_oracle}) {
      std::vector<double> gamma(N + 1);
      std::vector<double> tau(N + 1);
      for (std::size_t k = 1; k <= N; ++k) {
        gamma[k] = gamma_k(T, N, k, m).value;
        tau[k] = tau_k(T, N, k, m).value;
      }
      for (std::size_t k = 1; k <= N; ++k) {
        for (std::size_t K = k; K <= N; ++K) {
          const double delta = delta_kK(T, N, k, K, m).value;
          const double nabla = nabla_kK(T, N, k, K, m).value;
          const std::string tag =
              "N=" + std::to_string(N) + " k=" + std::to_string(k) + " K=" + std::to_string(K);
          t.check(nabla <= tau[k] + slack, tag + " nabla<=tau_k");
          t.check(gamma[k] <= delta + slack, tag + " Gamma_k<=Delta");
          if (K < 2 * k) {
            ++literal_pairs;
            t.check(tau[k] <= delta + slack, tag + " tau_k<=Delta");
            t.check(nabla <= gamma[k] + slack, tag + " nabla<=Gamma_k");
          } else {
            ++matched_pairs;
            if (tau[k] > delta + slack || nabla > gamma[k] + slack) ++literal_misses;
            t.check(tau[K] <= delta + slack, tag + " tau_K<=Delta");
            t.check(nabla <= gamma[K] + slack, tag + " nabla<=Gamma_K");
          }
        }
      }
    }
  }
  return t.outcome("200 diagonals, " + std::to_string(literal_pairs) + " pairs with K<2k, " +
                   std::to_string(matched_pairs) + " pairs compared at K (literal middle links fail on " +
                   std::to_string(literal_misses) + " of them)");
}

Outcome invariance() {
  std::mt19937_64 rng(106);
  Tally t;
  const std::vector<Operator> ops{Operator::diagonal({}, {2.0, 1.0}),
                                  Operator::shift({0.5, 3.0}, {1.0, 2.0})};
  double min_slack = INFINITY;
  std::size_t runs = 0;
  for (const auto& T : ops) {
    for (ProofPart part : {ProofPart::gamma, ProofPart::tau, ProofPart::delta, ProofPart::nabla}) {
      for (double eps : {0.1, 0.05}) {
        const Subspace M(random_window_basis(rng, 4));
        const std::string tag = std::string(T.kind()) + " part " + std::string(to_string(part));
        t.check(!M.within_finite_support(), tag + " witness has a tail");
        const auto rep = run_invariance_case(T, part, M, eps, 0.05, {static_cast<std::uint64_t>(runs), 0, 100});
        ++runs;
        t.check(rep.passed, tag + " passed");
        for (const auto& chk : rep.checks) {
          min_slack = std::min(min_slack, chk.slack);
          t.check(chk.holds && chk.slack >= 0.0, tag + " " + chk.name);
        }
      }
    }
  }
  std::ostringstream os;
  os << runs << " cases, min slack " << min_slack;
  return t.outcome(os.str());
}

Outcome dense_intersection() {
  std::mt19937_64 rng(107);
  Tally t;
  double worst = 0.0;
  for (std::size_t count = 1; count <= 4; ++count) {
    const double r = random_ratio(rng);
    std::vector<LinearFunctional> fs;
    std::vector<TailVector> reps;
    while (fs.size() < count) {
      TailVector v = random_tail_vector(rng, r);
      reps.push_back(v);
      if (!is_positive_definite(gram(reps))) {
        reps.pop_back();
        continue;
      }
      fs.emplace_back(v, l2);
    }
    const auto rep = check_dense_intersection(fs, 100, 1e-8, count);
    worst = std::max(worst, rep.max_distance);
    t.check(rep.passed && rep.samples == 100, std::to_string(count) + " functionals");
  }
  std::ostringstream os;
  os << "1-4 functionals, max distance " << worst;
  return t.outcome(os.str());
}

int run_cli(const Paths& paths, const std::string& fixture, const std::filesystem::path& out) {
  const std::string cmd = "\"" + paths.cli + "\" run --config \"" +
                          (paths.fixtures / fixture).string() + "\" --out \"" + out.string() +
                          "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome cli_contract(const Paths& paths) {
  Tally t;
  std::filesystem::create_directories(paths.work);
  const struct {
    const char* fixture;
    int code;
  } cases[] = {{"quantities_alternating.json", 0}, {"quantities_identity.json", 0},
               {"construction_shift.json", 0},     {"invariance_alternating_a.json", 0},
               {"lemma_two.json", 0},              {"quantities_violation.json", 1},
               {"lemma_violation.json", 1},        {"bad_epsilon.json", 2},
               {"bad_schedule.json", 2},           {"zero_budget.json", 2},
               {"degenerate_witness.json", 2}};
  for (const auto& c : cases) {
    const auto stem = std::filesystem::path(c.fixture).stem().string();
    const auto first = paths.work / (stem + ".1.json");
    const auto second = paths.work / (stem + ".2.json");
    std::filesystem::remove(first);
    std::filesystem::remove(second);
    const int a = run_cli(paths, c.fixture, first);
    const int b = run_cli(paths, c.fixture, second);
    t.check(a == c.code && b == c.code,
            std::string(c.fixture) + " exit " + std::to_string(a) + " expected " + std::to_string(c.code));
    if (c.code != 2) {
      const std::string ra = slurp(first);
      t.check(!ra.empty() && ra == slurp(second), std::string(c.fixture) + " reports differ");
    }
  }
  return t.outcome(std::to_string(std::size(cases)) + " fixtures");
}

}  // namespace

int main(int argc, char** argv) {
  Paths paths;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") paths.cli = argv[i + 1];
    else if (flag == "--fixtures") paths.fixtures = argv[i + 1];
    else if (flag == "--work") paths.work = argv[i + 1];
    else {
      std::cerr << "acceptance: unknown flag " << flag << "\n";
      return 2;
    }
  }
  if (paths.cli.empty() || paths.fixtures.empty() || paths.work.empty()) {
    std::cerr << "usage: acceptance --cli <exe> --fixtures <dir> --work <dir>\n";
    return 2;
  }

  const std::vector<Criterion> criteria{
      {1, "biorthogonality suite", 10.0, biorthogonality},
      {2, "construction suite", 60.0, construction},
      {3, "oracle equivalence", 120.0, oracle_equivalence},
      {4, "structured limits", 30.0, structured_limits},
      {5, "ordering chain", 0.0, ordering_chain},
      {6, "density-invariance cases", 60.0, invariance},
      {7, "dense kernel intersection", 0.0, dense_intersection},
      {8, "CLI contract", 0.0, [&paths] { return cli_contract(paths); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && secs > c.time_limit) {
      out.passed = false;
      out.detail += ", over time limit";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << (out.passed ? "PASS" : "FAIL") << "  criterion " << c.id << " " << c.name << ": "
              << out.detail << " (" << timing;
    if (c.time_limit > 0.0) std::cout << " / " << c.time_limit << "s";
    std::cout << ")" << std::endl;
    if (!out.passed) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
