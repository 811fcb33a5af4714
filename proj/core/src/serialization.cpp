#include "opquant/serialization.hpp"

#include <string>
#include <variant>
#include <vector>

#include "opquant/error.hpp"

namespace opquant {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::config_error, path + ": " + what);
}

Json numbers(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(x);
  return a;
}

Json matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "must be a number");
  return j.get<double>();
}

std::vector<double> numbers_at(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Eigen::MatrixXd matrix_at(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "must be an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    const std::vector<double> row = numbers_at(j[static_cast<std::size_t>(i)], row_path);
    if (static_cast<Eigen::Index>(row.size()) != n) fail(row_path, "matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
  }
  return m;
}

Json weights(const WeightSequence& w) {
  Json j;
  j["prefix"] = numbers(w.prefix);
  j["periodic"] = numbers(w.periodic);
  return j;
}

}  // namespace

Json to_json(const TailVector& v) {
  Json j;
  j["prefix"] = numbers(v.prefix());
  j["tail_coeffs"] = numbers(v.tail_coeffs());
  j["tail_ratio"] = v.tail_ratio();
  return j;
}

Json to_json(SpaceConfig space) {
  Json j;
  switch (space.p) {
    case Exponent::one: j["p"] = 1; break;
    case Exponent::two: j["p"] = 2; break;
    case Exponent::infinity: j["p"] = "inf"; break;
  }
  return j;
}

Json to_json(const Operator& T) {
  Json j;
  j["kind"] = std::string(T.kind());
  std::visit(
      [&](const auto& op) {
        using Op = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<Op, Diagonal>) {
          j.update(weights(op.values));
        } else if constexpr (std::is_same_v<Op, WeightedShift>) {
          j.update(weights(op.weights));
        } else if constexpr (std::is_same_v<Op, FiniteRankPlus>) {
          j.update(weights(op.diagonal));
          j["block"] = matrix(op.block);
        } else {
          j["block"] = matrix(op.matrix);
        }
      },
      T.payload());
  return j;
}

Json to_json(const Subspace& M) {
  Json basis = Json::array();
  for (const auto& v : M.basis()) basis.push_back(to_json(v));
  return basis;
}

Json to_json(const QuantityEstimate& e) {
  Json j;
  j["quantity"] = std::string(to_string(e.quantity));
  j["value"] = e.value;
  j["k"] = e.k;
  j["K"] = e.K;
  j["N"] = e.N;
  j["method"] = std::string(to_string(e.method));
  j["bracket"] = Json::array({e.bracket.lower, e.bracket.upper});
  j["seed"] = e.seed;
  if (!e.witness.empty()) j["witness"] = e.witness;
  return j;
}

Json to_json(const CaseReport& r) {
  Json j;
  j["part"] = std::string(to_string(r.part));
  j["c"] = r.c;
  j["delta"] = r.delta;
  j["epsilon"] = r.epsilon;
  j["inner_dim"] = r.inner_dim;
  j["witness_M"] = to_json(r.witness_M);
  j["constructed_L"] = to_json(r.constructed_L);
  Json measured;
  for (const auto& [name, value] : r.measured) measured[name] = value;
  j["measured"] = measured;
  Json checks = Json::array();
  for (const auto& b : r.checks) {
    Json c;
    c["name"] = b.name;
    c["measured"] = b.measured;
    c["bound"] = b.bound;
    c["direction"] = b.is_upper ? "<=" : ">=";
    c["slack"] = b.slack;
    c["holds"] = b.holds;
    checks.push_back(std::move(c));
  }
  j["checks"] = checks;
  j["passed"] = r.passed;
  return j;
}

Json to_json(const BiorthogonalSystem& s) {
  Json j;
  j["space"] = to_json(s.space);
  Json m = Json::array();
  Json x = Json::array();
  for (const auto& v : s.vectors) m.push_back(to_json(v));
  for (const auto& f : s.functionals) x.push_back(to_json(f.representer()));
  j["m"] = m;
  j["x"] = x;
  return j;
}

Json to_json(const DenseIntersectionReport& r) {
  Json j;
  j["samples"] = r.samples;
  j["tol"] = r.tol;
  j["max_distance"] = r.max_distance;
  j["max_pairing"] = r.max_pairing;
  j["max_truncation_index"] = r.max_truncation_index;
  j["passed"] = r.passed;
  return j;
}

TailVector tail_vector_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object with prefix/tail_coeffs/tail_ratio");
  std::vector<double> prefix;
  std::vector<double> coeffs{0.0};
  double ratio = 0.0;
  if (j.contains("prefix")) prefix = numbers_at(j["prefix"], path + ".prefix");
  if (j.contains("tail_coeffs")) coeffs = numbers_at(j["tail_coeffs"], path + ".tail_coeffs");
  if (j.contains("tail_ratio")) ratio = number_at(j["tail_ratio"], path + ".tail_ratio");
  try {
    return TailVector(std::move(prefix), std::move(coeffs), ratio);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

SpaceConfig space_from_json(const Json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("p")) fail(path + ".p", "is required");
  const Json& p = j["p"];
  if (p.is_number()) {
    const double v = p.get<double>();
    if (v == 1.0) return {Exponent::one};
    if (v == 2.0) return {Exponent::two};
  } else if (p.is_string()) {
    const auto s = p.get<std::string>();
    if (s == "inf" || s == "infinity") return {Exponent::infinity};
  }
  fail(path + ".p", "must be one of 1, 2, \"inf\"");
}

Operator operator_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) fail(path + ".kind", "is required");
  const auto kind = j["kind"].get<std::string>();
  auto seq = [&](const char* field, std::vector<double> fallback) {
    return j.contains(field) ? numbers_at(j[field], path + "." + field) : fallback;
  };
  try {
    if (kind == "diagonal" || kind == "shift" || kind == "finite_rank_plus") {
      std::vector<double> prefix = seq("prefix", {});
      std::vector<double> periodic = seq("periodic", {});
      if (periodic.empty()) fail(path + ".periodic", "must be a nonempty array");
      if (kind == "diagonal") return Operator::diagonal(std::move(prefix), std::move(periodic));
      if (kind == "shift") return Operator::shift(std::move(prefix), std::move(periodic));
      if (!j.contains("block")) fail(path + ".block", "is required for finite_rank_plus");
      return Operator::finite_rank_plus(matrix_at(j["block"], path + ".block"), std::move(prefix),
                                        std::move(periodic));
    }
    if (kind == "dense") {
      if (!j.contains("block")) fail(path + ".block", "is required for dense");
      return Operator::dense(matrix_at(j["block"], path + ".block"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config_error) throw;
    fail(path, e.what());
  }
  fail(path + ".kind", "must be one of diagonal, shift, finite_rank_plus, dense");
}

}  // namespace opquant
