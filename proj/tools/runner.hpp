#pragma once

// Configuration-driven experiment runner behind the `opquant` executable.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opquant/construction.hpp"
#include "opquant/operators.hpp"
#include "opquant/quantities.hpp"
#include "opquant/serialization.hpp"

namespace opquant::cli {

enum class Experiment { quantities, construction_suite, invariance_case, lemma_check };

std::string_view to_string(Experiment e) noexcept;

struct Parameters {
  std::uint64_t seed = 0;

  // quantities
  Quantity quantity = Quantity::gamma;
  Method method = Method::svd_oracle;
  std::vector<Dimensions> schedule;
  std::size_t restarts = 64;
  std::vector<double> expected;  // optional reference values, one per schedule point
  double tolerance = 1e-9;

  // construction_suite / invariance_case
  double epsilon = 0.1;
  double c = 1.0;
  double delta = 0.05;
  std::size_t systems = 10;
  std::size_t combinations = 1000;
  std::size_t min_dim = 2;
  std::size_t max_dim = 8;
  ProofPart part = ProofPart::gamma;
  std::vector<TailVector> witness;
  std::size_t inner_dim = 0;
  std::size_t random_subbases = 100;

  // lemma_check
  std::vector<TailVector> functionals;
  std::size_t samples = 100;
  double tol = 1e-8;

  // vectors: truncation size for the singular-value entry (0: largest N in
  // the schedule, or 8)
  std::size_t N = 0;
};

struct ExperimentConfig {
  SpaceConfig space;
  Operator op = Operator::identity();
  Experiment experiment = Experiment::quantities;
  Parameters parameters;
  std::string output_path;
};

/// Validates a JSON document; throws Error(config_error) with the field path.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical encoding; parse_config(to_json(c)) reproduces c.
Json to_json(const ExperimentConfig& config);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

struct Violation {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;
};

struct RunReport {
  Json config_echo;
  std::uint64_t seed = 0;
  Json results = Json::array();
  std::vector<Violation> violations;
  std::vector<std::string> errors;  // module errors surfaced during the run

  [[nodiscard]] int exit_code() const noexcept;
  [[nodiscard]] Json to_json() const;
};

RunReport run(const ExperimentConfig& config);

/// Deterministic regression bundle of (input, expected) pairs.
Json emit_test_vectors(const ExperimentConfig& config);

/// Resolves the effective seed: explicit flag, then OPQUANT_SEED, then the
/// config value. Throws Error(config_error) on a malformed environment value.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t config_seed);

/// Writes text to a file (or stdout for "-" / empty); throws std::runtime_error on IO failure.
void write_text(const std::string& path, const std::string& text);

const char* version() noexcept;

}  // namespace opquant::cli
