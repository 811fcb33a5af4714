// opquant: command-line front end for the experiment runner.
//
//   opquant run --config <file> [--out <file>] [--seed <u64>]
//   opquant quantities --op <json> --quantity <G|D|T|N> --schedule <list>
//   opquant verify --suite construction --epsilon <e> --c <c> --seed <u64>
//   opquant vectors --config <file> --out <file>
//
// Exit status: 0 no violations, 1 inequality violations, 2 config or IO error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "opquant/error.hpp"
#include "runner.hpp"

namespace {

using opquant::Json;
using namespace opquant::cli;

constexpr int exit_config = 2;

int finish(const RunReport& report, const std::string& out) {
  write_text(out, report.to_json().dump(2) + "\n");
  for (const auto& e : report.errors) std::cerr << "opquant: " << e << "\n";
  if (!report.violations.empty()) {
    std::cerr << "opquant: " << report.violations.size() << " violation(s)\n";
  }
  return report.exit_code();
}

// Accepts a JSON list of [N, k(, K)] triples or "N,k[,K];N,k[,K];...".
Json parse_schedule_arg(const std::string& text) {
  if (!text.empty() && text.front() == '[') {
    try {
      return Json::parse(text);
    } catch (const Json::parse_error&) {
      throw opquant::Error(opquant::ErrorCode::config_error, "--schedule: malformed JSON list");
    }
  }
  Json out = Json::array();
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    Json point = Json::array();
    std::size_t pos = start;
    while (pos < end) {
      const std::size_t comma = std::min(text.find(',', pos), end);
      const std::string item = text.substr(pos, comma - pos);
      try {
        std::size_t used = 0;
        const long long v = std::stoll(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        point.push_back(v);
      } catch (const std::exception&) {
        throw opquant::Error(opquant::ErrorCode::config_error,
                             "--schedule: '" + item + "' is not an integer");
      }
      pos = comma + 1;
    }
    out.push_back(point);
    start = end + 1;
  }
  return out;
}

Json parse_op_arg(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
    throw opquant::Error(opquant::ErrorCode::config_error, "--op: malformed JSON");
  }
}

Json space_json(const std::string& p) {
  Json s;
  if (p == "1") {
    s["p"] = 1;
  } else if (p == "2") {
    s["p"] = 2;
  } else {
    s["p"] = p;
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operational quantities of operators on sequence spaces"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out", out_path, "Report path (default: config output_path or stdout)");
  run_cmd->add_option("--seed", seed, "Seed override (takes precedence over OPQUANT_SEED)");

  std::string op_text;
  std::string quantity;
  std::string schedule;
  std::string method = "svd_oracle";
  std::string p = "2";
  std::uint64_t restarts = 64;
  auto* q_cmd = app.add_subcommand("quantities", "Evaluate a quantity along a schedule");
  q_cmd->add_option("--op", op_text, "Operator as inline JSON")->required();
  q_cmd->add_option("--quantity", quantity, "Gamma|Delta|Tau|Nabla (or G|D|T|N)")->required();
  q_cmd->add_option("--schedule", schedule, "[[N,k,K],...] or N,k,K;N,k,K")->required();
  q_cmd->add_option("--method", method, "svd_oracle|subset_oracle|grassmann_search");
  q_cmd->add_option("--restarts", restarts, "Grassmann search restarts");
  q_cmd->add_option("--p", p, "Exponent: 1, 2 or inf");
  q_cmd->add_option("--seed", seed, "Seed");
  q_cmd->add_option("--out", out_path, "Report path (default: stdout)");

  std::string suite;
  double epsilon = 0.1;
  double c = 1.0;
  std::uint64_t systems = 10;
  std::uint64_t combinations = 1000;
  std::string verify_op = R"({"kind":"diagonal","prefix":[],"periodic":[1,2]})";
  auto* v_cmd = app.add_subcommand("verify", "Run a built-in verification suite");
  v_cmd->add_option("--suite", suite, "construction|lemma")->required();
  v_cmd->add_option("--epsilon", epsilon, "Distortion parameter in (0,1)");
  v_cmd->add_option("--c", c, "Budget constant (> 0)");
  v_cmd->add_option("--seed", seed, "Seed");
  v_cmd->add_option("--op", verify_op, "Operator as inline JSON");
  v_cmd->add_option("--systems", systems, "Number of seeded systems");
  v_cmd->add_option("--combinations", combinations, "Random combinations per system");
  v_cmd->add_option("--out", out_path, "Report path (default: stdout)");

  auto* vec_cmd = app.add_subcommand("vectors", "Emit regression test vectors for a config");
  vec_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  vec_cmd->add_option("--out", out_path, "Bundle path")->required();
  vec_cmd->add_option("--seed", seed, "Seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    if (*run_cmd || *vec_cmd) {
      ExperimentConfig config = load_config(config_path);
      config.parameters.seed = resolve_seed(seed, config.parameters.seed);
      if (*vec_cmd) {
        write_text(out_path, emit_test_vectors(config).dump(2) + "\n");
        return 0;
      }
      return finish(run(config), out_path.empty() ? config.output_path : out_path);
    }

    Json doc;
    if (*q_cmd) {
      doc["space"] = space_json(p);
      doc["operator"] = parse_op_arg(op_text);
      doc["experiment"] = "quantities";
      doc["parameters"]["quantity"] = quantity;
      doc["parameters"]["method"] = method;
      doc["parameters"]["schedule"] = parse_schedule_arg(schedule);
      doc["parameters"]["restarts"] = restarts;
    } else {
      doc["space"] = space_json("2");
      doc["operator"] = parse_op_arg(verify_op);
      if (suite == "construction") {
        doc["experiment"] = "construction_suite";
        doc["parameters"]["epsilon"] = epsilon;
        doc["parameters"]["c"] = c;
        doc["parameters"]["systems"] = systems;
        doc["parameters"]["combinations"] = combinations;
      } else if (suite == "lemma") {
        doc["experiment"] = "lemma_check";
      } else {
        throw opquant::Error(opquant::ErrorCode::config_error,
                             "--suite: must be one of construction, lemma");
      }
    }
    ExperimentConfig config = parse_config(doc);
    config.parameters.seed = resolve_seed(seed, config.parameters.seed);
    return finish(run(config), out_path);
  } catch (const opquant::Error& e) {
    std::cerr << "opquant: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "opquant: " << e.what() << "\n";
    return exit_config;
  }
}
