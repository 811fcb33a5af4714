#include "runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "opquant/error.hpp"

#ifndef OPQUANT_VERSION
#define OPQUANT_VERSION "unknown"
#endif

namespace opquant::cli {

namespace {

const SpaceConfig l2{Exponent::two};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::config_error, path + ": " + what);
}

// Field readers over the "parameters" object. Each records the key as seen
// so unknown keys can be rejected afterwards.
class Fields {
 public:
  Fields(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {}

  bool has(const char* key) {
    seen_.insert(key);
    return obj_.contains(key);
  }
  const Json& at(const char* key) const { return obj_[key]; }
  std::string path(const char* key) const { return path_ + "." + key; }

  double real(const char* key, double fallback) {
    if (!has(key)) return fallback;
    if (!at(key).is_number()) fail(path(key), "must be a number");
    return at(key).get<double>();
  }

  std::uint64_t count(const char* key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    fail(path(key), "must be a nonnegative integer");
  }

  std::string text(const char* key) {
    if (!has(key)) fail(path(key), "is required");
    if (!at(key).is_string()) fail(path(key), "must be a string");
    return at(key).get<std::string>();
  }

  std::vector<TailVector> vectors(const char* key) {
    std::vector<TailVector> out;
    if (!has(key)) return out;
    if (!at(key).is_array()) fail(path(key), "must be an array of vectors");
    for (std::size_t i = 0; i < at(key).size(); ++i) {
      out.push_back(tail_vector_from_json(at(key)[i], path(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail(path_ + "." + key, "unknown field");
    }
  }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

std::vector<Dimensions> parse_schedule(Fields& f, Quantity q) {
  if (!f.has("schedule")) fail(f.path("schedule"), "is required");
  const Json& s = f.at("schedule");
  if (!s.is_array() || s.empty()) fail(f.path("schedule"), "must be a nonempty array");
  std::vector<Dimensions> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::string p = index_path(f.path("schedule"), i);
    const Json& e = s[i];
    if (!e.is_array() || e.size() < 2 || e.size() > 3) fail(p, "must be [N, k] or [N, k, K]");
    std::size_t v[3] = {0, 0, 0};
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (!e[j].is_number_integer() || e[j].get<std::int64_t>() < 0) {
        fail(p, "entries must be nonnegative integers");
      }
      v[j] = static_cast<std::size_t>(e[j].get<std::int64_t>());
    }
    Dimensions d{v[0], v[1], e.size() == 3 ? v[2] : v[1]};
    if (d.k < 1) fail(p, "1 ≤ k required");
    if (d.k > d.K) fail(p, "k ≤ K required");
    if (d.K > d.N) fail(p, "K ≤ N required");
    if (q == Quantity::gamma || q == Quantity::tau) d.K = d.k;
    if (!out.empty()) {
      const Dimensions& prev = out.back();
      if (d.N < prev.N || d.k < prev.k || d.K < prev.K) fail(p, "schedule must be monotone in N, k, K");
    }
    out.push_back(d);
  }
  return out;
}

void require_unit_interval(double x, const std::string& path) {
  if (!(x > 0.0 && x < 1.0)) fail(path, "must lie in (0,1)");
}

void require_positive(double x, const std::string& path) {
  if (!(x > 0.0) || !std::isfinite(x)) fail(path, "must be > 0");
}

void require_l2(const ExperimentConfig& c) {
  if (c.space.p != Exponent::two) {
    fail("space.p", std::string(to_string(c.experiment)) + " requires p = 2");
  }
}

Parameters parse_parameters(const Json& doc, const ExperimentConfig& c) {
  static const Json empty = Json::object();
  const Json& obj = doc.contains("parameters") ? doc["parameters"] : empty;
  if (!obj.is_object()) fail("parameters", "must be an object");
  Fields f(obj, "parameters");
  Parameters p;
  p.seed = f.count("seed", 0);
  p.N = f.count("N", 0);
  switch (c.experiment) {
    case Experiment::quantities: {
      const auto q = parse_quantity(f.text("quantity"));
      if (!q) fail(f.path("quantity"), "must be one of Gamma, Delta, Tau, Nabla (or G, D, T, N)");
      p.quantity = *q;
      if (f.has("method")) {
        const auto m = parse_method(f.text("method"));
        if (!m) fail(f.path("method"), "must be one of svd_oracle, subset_oracle, grassmann_search");
        p.method = *m;
      }
      p.schedule = parse_schedule(f, p.quantity);
      p.restarts = f.count("restarts", 64);
      if (p.restarts < 1) fail(f.path("restarts"), "must be ≥ 1");
      p.tolerance = f.real("tolerance", 1e-9);
      if (!(p.tolerance >= 0.0)) fail(f.path("tolerance"), "must be ≥ 0");
      if (f.has("expected")) {
        const Json& e = f.at("expected");
        if (!e.is_array() || e.size() != p.schedule.size()) {
          fail(f.path("expected"), "needs one number per schedule point");
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
          if (!e[i].is_number()) fail(index_path(f.path("expected"), i), "must be a number");
          p.expected.push_back(e[i].get<double>());
        }
      }
      if (p.method == Method::subset_oracle && c.op.kind() != "diagonal") {
        fail(f.path("method"), "subset_oracle requires a diagonal operator");
      }
      if (p.method != Method::subset_oracle && c.space.p != Exponent::two) {
        fail(f.path("method"), "p ≠ 2 supports subset_oracle only");
      }
      break;
    }
    case Experiment::construction_suite: {
      require_l2(c);
      p.epsilon = f.real("epsilon", 0.1);
      require_unit_interval(p.epsilon, f.path("epsilon"));
      p.c = f.real("c", 1.0);
      require_positive(p.c, f.path("c"));
      p.systems = f.count("systems", 10);
      if (p.systems < 1) fail(f.path("systems"), "must be ≥ 1");
      p.combinations = f.count("combinations", 1000);
      if (p.combinations < 1) fail(f.path("combinations"), "must be ≥ 1");
      p.min_dim = f.count("min_dim", 2);
      p.max_dim = f.count("max_dim", 8);
      if (p.min_dim < 1) fail(f.path("min_dim"), "must be ≥ 1");
      if (p.max_dim < p.min_dim || p.max_dim > 16) {
        fail(f.path("max_dim"), "must lie in [min_dim, 16]");
      }
      break;
    }
    case Experiment::invariance_case: {
      require_l2(c);
      const auto part = parse_part(f.text("part"));
      if (!part) fail(f.path("part"), "must be one of a, b, c, d");
      p.part = *part;
      p.epsilon = f.real("epsilon", 0.1);
      require_unit_interval(p.epsilon, f.path("epsilon"));
      p.delta = f.real("delta", 0.05);
      require_positive(p.delta, f.path("delta"));
      p.witness = f.vectors("witness");
      if (p.witness.empty()) fail(f.path("witness"), "must be a nonempty array of vectors");
      if (!is_positive_definite(gram(p.witness))) {
        fail(f.path("witness"), "basis must be linearly independent");
      }
      p.inner_dim = f.count("inner_dim", 0);
      if (p.inner_dim > p.witness.size()) fail(f.path("inner_dim"), "must not exceed the witness dimension");
      p.random_subbases = f.count("random_subbases", 100);
      break;
    }
    case Experiment::lemma_check: {
      require_l2(c);
      p.functionals = f.vectors("functionals");
      p.samples = f.count("samples", 100);
      if (p.samples < 1) fail(f.path("samples"), "must be ≥ 1");
      p.tol = f.real("tol", 1e-8);
      require_positive(p.tol, f.path("tol"));
      break;
    }
  }
  f.reject_unknown();
  return p;
}

Json parameters_to_json(const ExperimentConfig& c) {
  const Parameters& p = c.parameters;
  Json j;
  j["seed"] = p.seed;
  switch (c.experiment) {
    case Experiment::quantities: {
      j["quantity"] = std::string(to_string(p.quantity));
      j["method"] = std::string(to_string(p.method));
      Json s = Json::array();
      for (const auto& d : p.schedule) s.push_back(Json::array({d.N, d.k, d.K}));
      j["schedule"] = s;
      j["restarts"] = p.restarts;
      if (!p.expected.empty()) j["expected"] = p.expected;
      j["tolerance"] = p.tolerance;
      break;
    }
    case Experiment::construction_suite:
      j["epsilon"] = p.epsilon;
      j["c"] = p.c;
      j["systems"] = p.systems;
      j["combinations"] = p.combinations;
      j["min_dim"] = p.min_dim;
      j["max_dim"] = p.max_dim;
      break;
    case Experiment::invariance_case: {
      j["part"] = std::string(to_string(p.part));
      j["epsilon"] = p.epsilon;
      j["delta"] = p.delta;
      Json w = Json::array();
      for (const auto& v : p.witness) w.push_back(opquant::to_json(v));
      j["witness"] = w;
      j["inner_dim"] = p.inner_dim;
      j["random_subbases"] = p.random_subbases;
      break;
    }
    case Experiment::lemma_check: {
      Json fs = Json::array();
      for (const auto& v : p.functionals) fs.push_back(opquant::to_json(v));
      j["functionals"] = fs;
      j["samples"] = p.samples;
      j["tol"] = p.tol;
      break;
    }
  }
  if (p.N != 0) j["N"] = p.N;
  return j;
}

Json violation_json(const Violation& v) {
  Json j;
  j["name"] = v.name;
  j["measured"] = v.measured;
  j["bound"] = v.bound;
  j["slack"] = v.slack;
  return j;
}

// Seeded window of dimension `dim`: finitely supported vectors mixed with
// tails sharing one ratio, at least one tail, Gram well conditioned.
std::vector<TailVector> random_window(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.1, 0.8);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution tail_coin(0.6);
  std::uniform_int_distribution<std::size_t> period(1, 3);
  const double r = coin(rng) ? mag(rng) : -mag(rng);
  for (;;) {
    std::vector<TailVector> basis;
    bool any_tail = false;
    for (std::size_t i = 0; i < dim; ++i) {
      const bool tail = tail_coin(rng) || (i + 1 == dim && !any_tail);
      any_tail = any_tail || tail;
      std::uniform_int_distribution<std::size_t> len(tail ? 0 : 1, dim + 2);
      std::vector<double> prefix(len(rng));
      for (auto& x : prefix) x = coord(rng);
      std::vector<double> coeffs{0.0};
      if (tail) {
        coeffs.resize(period(rng));
        for (auto& x : coeffs) x = coord(rng);
      }
      basis.emplace_back(std::move(prefix), std::move(coeffs), tail ? r : 0.0);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram(basis), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() > 1e-3 * eig.eigenvalues().maxCoeff()) return basis;
  }
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<double> random_coeffs(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_int_distribution<std::size_t> len(1, dim);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(len(rng));
  for (auto& x : a) x = u(rng);
  return a;
}

void run_quantities(const ExperimentConfig& c, RunReport& report) {
  const Parameters& p = c.parameters;
  const LimitEstimate le =
      limit_estimate(c.op, p.quantity, p.schedule, p.method, {p.restarts, p.seed});
  Json seq = Json::array();
  for (std::size_t i = 0; i < le.sequence.size(); ++i) {
    const QuantityEstimate& e = le.sequence[i];
    seq.push_back(opquant::to_json(e));
    const std::string name = "schedule[" + std::to_string(i) + "]";
    if (e.value < e.bracket.lower || e.value > e.bracket.upper) {
      report.violations.push_back({name + ".bracket", e.value, e.bracket.lower,
                                   std::min(e.value - e.bracket.lower, e.bracket.upper - e.value)});
    }
    if (!p.expected.empty()) {
      const double gap = std::abs(e.value - p.expected[i]);
      if (!(gap <= p.tolerance)) {
        report.violations.push_back({name + ".expected", e.value, p.expected[i], p.tolerance - gap});
      }
    }
  }
  Json r;
  r["kind"] = "quantities";
  r["quantity"] = std::string(to_string(p.quantity));
  r["method"] = std::string(to_string(p.method));
  r["sequence"] = seq;
  r["extrapolated"] = le.extrapolated;
  r["converged"] = le.converged;
  report.results.push_back(std::move(r));
}

void run_construction_suite(const ExperimentConfig& c, RunReport& report) {
  const Parameters& p = c.parameters;
  for (std::size_t s = 0; s < p.systems; ++s) {
    std::mt19937_64 rng = stream(p.seed, s);
    std::uniform_int_distribution<std::size_t> dim_dist(p.min_dim, p.max_dim);
    const std::size_t dim = dim_dist(rng);
    const Subspace M(random_window(rng, dim));
    const BiorthogonalSystem sys = build_biorthogonal(M, dim, l2, rng());
    const CoreApproximation ca = build_core_approximants(sys, c.op, p.epsilon, p.c);
    const std::string tag = "system[" + std::to_string(s) + "]";
    auto check = [&](const std::string& name, double measured, double bound, bool upper) {
      const double slack = upper ? bound - measured : measured - bound;
      if (slack < -inequality_slack) report.violations.push_back({tag + "." + name, measured, bound, slack});
    };

    const BiorthogonalDefects d = check_biorthogonal(sys);
    check("kernel_pairing", d.max_kernel_pairing, biorthogonal_tolerance, true);
    check("unit_defect", d.max_unit_defect, biorthogonal_tolerance, true);
    check("independent", d.independent ? 1.0 : 0.0, 1.0, false);

    double budget_ratio = 0.0;
    for (std::size_t n = 0; n < ca.z.size(); ++n) {
      budget_ratio = std::max(budget_ratio, ca.budgets[n] / ca.allowed[n]);
    }
    check("budget_ratio", budget_ratio, 1.0, true);
    const double core_pairing = max_core_kernel_pairing(ca);
    check("core_kernel_pairing", core_pairing, biorthogonal_tolerance, true);

    double min_margin = std::numeric_limits<double>::infinity();
    double max_distance_ratio = 0.0;
    double min_lower = std::numeric_limits<double>::infinity();
    double min_upper = std::numeric_limits<double>::infinity();
    std::size_t iso_failures = 0;
    std::size_t transfer_failures = 0;
    for (std::size_t t = 0; t < p.combinations; ++t) {
      const std::string at = "[" + std::to_string(t) + "]";
      const auto a = random_coeffs(rng, dim);
      const CoefficientBound cb = check_coefficient_bound(sys, a);
      for (double m : cb.margins) min_margin = std::min(min_margin, m);
      if (!cb.holds) {
        const double m = *std::min_element(cb.margins.begin(), cb.margins.end());
        report.violations.push_back({tag + ".coefficient_bound" + at, -m, 0.0, m});
      }
      const NearIsometryCheck iso = verify_near_isometry(ca, a);
      if (iso.Az_norm > 0.0) {
        max_distance_ratio = std::max(max_distance_ratio, iso.distance / (iso.scale * iso.Az_norm));
      }
      if (!iso.distance_holds) {
        ++iso_failures;
        report.violations.push_back({tag + ".near_isometry_distance" + at, iso.distance,
                                     iso.scale * iso.Az_norm, iso.scale * iso.Az_norm - iso.distance});
      }
      if (!iso.norm_bounds_hold) {
        ++iso_failures;
        report.violations.push_back({tag + ".near_isometry_norms" + at, iso.z_norm, iso.Az_norm,
                                     -std::abs(iso.z_norm - iso.Az_norm)});
      }
      if (iso.z_norm == 0.0) continue;
      const TransferCheck tr = verify_transfer_bounds(ca, c.op, a);
      min_lower = std::min(min_lower, tr.ratio_z - tr.lower_bound);
      min_upper = std::min(min_upper, tr.upper_bound - tr.ratio_z);
      if (!tr.lower_transfer_holds) {
        ++transfer_failures;
        report.violations.push_back({tag + ".transfer_lower" + at, tr.ratio_z, tr.lower_bound,
                                     tr.ratio_z - tr.lower_bound});
      }
      if (!tr.upper_transfer_holds) {
        ++transfer_failures;
        report.violations.push_back({tag + ".transfer_upper" + at, tr.ratio_z, tr.upper_bound,
                                     tr.upper_bound - tr.ratio_z});
      }
    }

    Json r;
    r["kind"] = "construction";
    r["system"] = s;
    r["dimension"] = dim;
    Json bj;
    bj["max_kernel_pairing"] = d.max_kernel_pairing;
    bj["max_unit_defect"] = d.max_unit_defect;
    bj["independent"] = d.independent;
    r["biorthogonal"] = bj;
    Json cj;
    cj["T_norm"] = ca.T_norm;
    cj["scale"] = ca.scale();
    cj["allowed"] = ca.allowed;
    cj["budgets"] = ca.budgets;
    cj["truncation_index"] = ca.truncation_index;
    cj["max_kernel_pairing"] = core_pairing;
    r["core"] = cj;
    Json sj;
    sj["combinations"] = p.combinations;
    sj["min_coefficient_margin"] = min_margin;
    sj["max_distance_over_bound"] = max_distance_ratio;
    sj["near_isometry_failures"] = iso_failures;
    sj["min_lower_transfer_slack"] = min_lower;
    sj["min_upper_transfer_slack"] = min_upper;
    sj["transfer_failures"] = transfer_failures;
    r["sweep"] = sj;
    report.results.push_back(std::move(r));
  }
}

void run_invariance(const ExperimentConfig& c, RunReport& report) {
  const Parameters& p = c.parameters;
  const CaseReport r = run_invariance_case(c.op, p.part, Subspace(p.witness), p.epsilon, p.delta,
                                           {p.seed, p.inner_dim, p.random_subbases});
  for (const auto& b : r.checks) {
    if (!b.holds) report.violations.push_back({"case." + b.name, b.measured, b.bound, b.slack});
  }
  Json j = opquant::to_json(r);
  j["kind"] = "invariance_case";
  report.results.push_back(std::move(j));
}

void run_lemma(const ExperimentConfig& c, RunReport& report) {
  const Parameters& p = c.parameters;
  std::vector<LinearFunctional> fs;
  for (const auto& v : p.functionals) fs.emplace_back(v, l2);
  const DenseIntersectionReport r = check_dense_intersection(fs, p.samples, p.tol, p.seed);
  if (!r.passed) {
    report.violations.push_back({"dense_intersection", r.max_distance, r.tol, r.tol - r.max_distance});
  }
  Json j = opquant::to_json(r);
  j["kind"] = "lemma_check";
  j["functionals"] = fs.size();
  report.results.push_back(std::move(j));
}

}  // namespace

const char* version() noexcept { return OPQUANT_VERSION; }

std::string_view to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::quantities: return "quantities";
    case Experiment::construction_suite: return "construction_suite";
    case Experiment::invariance_case: return "invariance_case";
    case Experiment::lemma_check: return "lemma_check";
  }
  return "quantities";
}

ExperimentConfig parse_config(const Json& doc) {
  if (!doc.is_object()) fail("config", "must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "space" && key != "operator" && key != "experiment" && key != "parameters" &&
        key != "output_path") {
      fail(key, "unknown field");
    }
  }
  ExperimentConfig c;
  c.space = doc.contains("space") ? space_from_json(doc["space"], "space") : SpaceConfig{};
  if (!doc.contains("operator")) fail("operator", "is required");
  c.op = operator_from_json(doc["operator"], "operator");
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) fail("experiment", "is required");
  const auto name = doc["experiment"].get<std::string>();
  if (name == "quantities") {
    c.experiment = Experiment::quantities;
  } else if (name == "construction_suite") {
    c.experiment = Experiment::construction_suite;
  } else if (name == "invariance_case") {
    c.experiment = Experiment::invariance_case;
  } else if (name == "lemma_check") {
    c.experiment = Experiment::lemma_check;
  } else {
    fail("experiment", "must be one of quantities, construction_suite, invariance_case, lemma_check");
  }
  c.parameters = parse_parameters(doc, c);
  if (doc.contains("output_path")) {
    if (!doc["output_path"].is_string()) fail("output_path", "must be a string");
    c.output_path = doc["output_path"].get<std::string>();
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Json to_json(const ExperimentConfig& config) {
  Json j;
  j["space"] = opquant::to_json(config.space);
  j["operator"] = opquant::to_json(config.op);
  j["experiment"] = std::string(to_string(config.experiment));
  j["parameters"] = parameters_to_json(config);
  if (!config.output_path.empty()) j["output_path"] = config.output_path;
  return j;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return to_json(a) == to_json(b);
}

int RunReport::exit_code() const noexcept {
  if (!errors.empty()) return 2;
  return violations.empty() ? 0 : 1;
}

Json RunReport::to_json() const {
  Json j;
  j["tool"] = "opquant";
  j["version"] = version();
  j["seed"] = seed;
  j["config"] = config_echo;
  j["results"] = results;
  Json v = Json::array();
  for (const auto& x : violations) v.push_back(violation_json(x));
  j["violations"] = v;
  j["errors"] = errors;
  return j;
}

RunReport run(const ExperimentConfig& config) {
  RunReport report;
  report.config_echo = to_json(config);
  report.seed = config.parameters.seed;
  try {
    switch (config.experiment) {
      case Experiment::quantities: run_quantities(config, report); break;
      case Experiment::construction_suite: run_construction_suite(config, report); break;
      case Experiment::invariance_case: run_invariance(config, report); break;
      case Experiment::lemma_check: run_lemma(config, report); break;
    }
  } catch (const Error& e) {
    report.errors.emplace_back(e.what());
  }
  return report;
}

Json emit_test_vectors(const ExperimentConfig& config) {
  const Parameters& p = config.parameters;
  Json vectors = Json::array();
  auto add = [&](const char* name, Json input, Json expected) {
    Json v;
    v["name"] = name;
    v["input"] = std::move(input);
    v["expected"] = std::move(expected);
    vectors.push_back(std::move(v));
  };

  {
    Json in;
    in["space"] = opquant::to_json(config.space);
    add("operator_norm", in, operator_norm(config.op, config.space));
  }

  if (config.space.p == Exponent::two) {
    std::size_t N = p.N;
    for (const auto& d : p.schedule) N = std::max(N, d.N);
    if (N == 0) N = 8;
    Json in;
    in["N"] = N;
    add("singular_values", in, svd_oracle(truncate_operator(config.op, N)));

    std::mt19937_64 rng = stream(p.seed, 0);
    const std::size_t dim = std::clamp<std::size_t>(p.max_dim, 2, 4);
    const Subspace M(random_window(rng, dim));
    const std::uint64_t sys_seed = rng();
    const BiorthogonalSystem sys = build_biorthogonal(M, dim, l2, sys_seed);
    Json bin;
    bin["window"] = opquant::to_json(M);
    bin["count"] = dim;
    bin["seed"] = sys_seed;
    add("biorthogonal_system", bin, opquant::to_json(sys));

    const double eps = config.experiment == Experiment::quantities ? 0.1 : p.epsilon;
    const double c = config.experiment == Experiment::quantities ? 1.0 : p.c;
    const CoreApproximation ca = build_core_approximants(sys, config.op, eps, c);
    Json cin;
    cin["epsilon"] = eps;
    cin["c"] = c;
    Json core_out;
    core_out["T_norm"] = ca.T_norm;
    core_out["allowed"] = ca.allowed;
    core_out["budgets"] = ca.budgets;
    core_out["truncation_index"] = ca.truncation_index;
    Json z = Json::array();
    for (const auto& v : ca.z) z.push_back(opquant::to_json(v));
    core_out["z"] = z;
    add("core_approximants", cin, core_out);

    for (int t = 0; t < 4; ++t) {
      std::vector<double> a = random_coeffs(rng, dim);
      const auto [zv, Az] = ca.combine(a);
      if (norm(zv, l2) == 0.0) continue;
      const TransferCheck tr = verify_transfer_bounds(ca, config.op, a);
      Json rin;
      rin["coeffs"] = a;
      Json rout;
      rout["ratio_z"] = tr.ratio_z;
      rout["ratio_Az"] = tr.ratio_Az;
      rout["lower_bound"] = tr.lower_bound;
      rout["upper_bound"] = tr.upper_bound;
      add("transfer_ratios", rin, rout);
    }
  }

  Json bundle;
  bundle["tool"] = "opquant";
  bundle["version"] = version();
  bundle["seed"] = p.seed;
  bundle["config"] = to_json(config);
  bundle["vectors"] = vectors;
  return bundle;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t config_seed) {
  if (flag) return *flag;
  if (const char* env = std::getenv("OPQUANT_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc{} || ptr != end) {
      throw Error(ErrorCode::config_error, "OPQUANT_SEED: must be an unsigned 64-bit integer");
    }
    return v;
  }
  return config_seed;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace opquant::cli
