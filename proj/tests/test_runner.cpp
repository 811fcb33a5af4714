#include <cstdlib>
#include <optional>
#include <string>

#include <gtest/gtest.h>

#include "opquant/error.hpp"
#include "runner.hpp"

namespace opquant::cli {
namespace {

constexpr const char* kMinimal = R"({
  "space": {"p": 2},
  "operator": {"kind": "diagonal", "prefix": [], "periodic": [1, 2]},
  "experiment": "quantities",
  "parameters": {"quantity": "Gamma", "schedule": [[8, 2, 2], [12, 3, 3]]}
})";

std::optional<ErrorCode> config_code(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string config_message(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string with_parameters(const std::string& experiment, const std::string& params) {
  return R"({"space":{"p":2},"operator":{"kind":"diagonal","prefix":[],"periodic":[1,2]},"experiment":")" +
         experiment + R"(","parameters":)" + params + "}";
}

TEST(ParseConfig, MinimalQuantities) {
  const ExperimentConfig c = parse_config(std::string(kMinimal));
  EXPECT_EQ(c.experiment, Experiment::quantities);
  EXPECT_EQ(c.parameters.quantity, Quantity::gamma);
  EXPECT_EQ(c.parameters.method, Method::svd_oracle);
  ASSERT_EQ(c.parameters.schedule.size(), 2u);
  EXPECT_EQ(c.parameters.schedule[1].N, 12u);
  EXPECT_EQ(c.parameters.schedule[1].k, 3u);
  EXPECT_EQ(c.parameters.seed, 0u);
  EXPECT_EQ(c.space.p, Exponent::two);
}

TEST(ParseConfig, RejectsOutOfRangeEpsilon) {
  const auto text = with_parameters("construction_suite", R"({"epsilon":1.5,"c":1})");
  EXPECT_EQ(config_code(text), ErrorCode::config_error);
  EXPECT_NE(config_message(text).find("parameters.epsilon"), std::string::npos);
}

TEST(ParseConfig, RejectsInnerDimensionAboveOuter) {
  const auto text = with_parameters("quantities", R"({"quantity":"Delta","schedule":[[8,3,2]]})");
  EXPECT_EQ(config_code(text), ErrorCode::config_error);
  EXPECT_NE(config_message(text).find("parameters.schedule[0]"), std::string::npos);
}

TEST(ParseConfig, RejectsNonPositiveBudgetConstant) {
  EXPECT_EQ(config_code(with_parameters("construction_suite", R"({"epsilon":0.1,"c":0})")),
            ErrorCode::config_error);
  EXPECT_EQ(config_code(with_parameters("invariance_case", R"({"part":"a","delta":-1,"witness":[]})")),
            ErrorCode::config_error);
}

TEST(ParseConfig, RejectsUnknownFieldsAndKinds) {
  EXPECT_EQ(config_code(with_parameters("quantities", R"({"quantity":"Gamma","schedule":[[4,1]],"bogus":1})")),
            ErrorCode::config_error);
  EXPECT_EQ(config_code(with_parameters("nonsense", "{}")), ErrorCode::config_error);
  EXPECT_EQ(config_code(with_parameters("quantities", R"({"quantity":"Omega","schedule":[[4,1]]})")),
            ErrorCode::config_error);
  EXPECT_EQ(config_code("{not json"), ErrorCode::config_error);
  EXPECT_EQ(config_code(R"({"space":{"p":3},"operator":{"kind":"diagonal","prefix":[],"periodic":[1]},)"
                        R"("experiment":"quantities","parameters":{"quantity":"Gamma","schedule":[[4,1]]}})"),
            ErrorCode::config_error);
}

TEST(ParseConfig, SubsetOracleNeedsDiagonal) {
  const std::string text =
      R"({"space":{"p":2},"operator":{"kind":"shift","prefix":[],"periodic":[1]},)"
      R"("experiment":"quantities","parameters":{"quantity":"Gamma","method":"subset_oracle","schedule":[[4,1]]}})";
  EXPECT_EQ(config_code(text), ErrorCode::config_error);
}

TEST(ParseConfig, GrassmannSearchNeedsHilbertSpace) {
  const std::string text =
      R"({"space":{"p":1},"operator":{"kind":"diagonal","prefix":[],"periodic":[1]},)"
      R"("experiment":"quantities","parameters":{"quantity":"Gamma","method":"grassmann_search","schedule":[[4,1]]}})";
  EXPECT_EQ(config_code(text), ErrorCode::config_error);
}

TEST(ParseConfig, RoundTrip) {
  const char* docs[] = {
      kMinimal,
      R"({"space":{"p":2},"operator":{"kind":"shift","prefix":[3],"periodic":[1,0.5]},
          "experiment":"construction_suite","parameters":{"epsilon":0.05,"c":2,"systems":3,"seed":17}})",
      R"({"space":{"p":"inf"},"operator":{"kind":"diagonal","prefix":[3],"periodic":[1,0.5]},
          "experiment":"quantities","parameters":{"quantity":"Nabla","method":"subset_oracle",
          "schedule":[[6,1,3]],"seed":4}})",
      R"({"space":{"p":2},"operator":{"kind":"diagonal","prefix":[],"periodic":[2,1]},
          "experiment":"invariance_case","parameters":{"part":"c","epsilon":0.1,"delta":0.05,
          "witness":[{"prefix":[1],"tail_coeffs":[0.5,0],"tail_ratio":0.5}]},"output_path":"x.json"})",
      R"({"space":{"p":2},"operator":{"kind":"diagonal","prefix":[],"periodic":[1]},
          "experiment":"lemma_check","parameters":{"samples":10,"tol":1e-9,
          "functionals":[{"prefix":[1,2],"tail_coeffs":[1],"tail_ratio":0.6}]}})",
  };
  for (const char* text : docs) {
    const ExperimentConfig c = parse_config(std::string(text));
    const ExperimentConfig again = parse_config(to_json(c));
    EXPECT_TRUE(c == again) << text;
    EXPECT_EQ(to_json(c).dump(), to_json(again).dump());
  }
}

TEST(Run, IdentityQuantitiesAreAllOne) {
  for (const char* q : {"Gamma", "Tau", "Delta", "Nabla"}) {
    const std::string text =
        std::string(R"({"space":{"p":2},"operator":{"kind":"diagonal","prefix":[],"periodic":[1]},)") +
        R"("experiment":"quantities","parameters":{"quantity":")" + q +
        R"(","schedule":[[6,1,2],[8,2,4],[10,3,6]],"expected":[1,1,1]}})";
    const RunReport r = run(parse_config(text));
    EXPECT_EQ(r.exit_code(), 0) << q;
    for (const auto& point : r.results[0]["sequence"]) {
      EXPECT_NEAR(point["value"].get<double>(), 1.0, 1e-12) << q;
    }
  }
}

TEST(Run, WrongExpectedValueIsAViolation) {
  const std::string text =
      R"({"space":{"p":2},"operator":{"kind":"diagonal","prefix":[1,2,3,4],"periodic":[0]},)"
      R"("experiment":"quantities","parameters":{"quantity":"Gamma","schedule":[[4,2]],"expected":[2.5]}})";
  const RunReport r = run(parse_config(text));
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_NEAR(r.violations[0].measured, 2.0, 1e-12);
  EXPECT_EQ(r.exit_code(), 1);
}

TEST(Run, AlternatingInvariancePartAPasses) {
  const std::string text = with_parameters(
      "invariance_case",
      R"({"part":"a","epsilon":0.05,"delta":0.05,"seed":3,"witness":[
           {"prefix":[1,0,0,0],"tail_coeffs":[0.5,0],"tail_ratio":0.5},
           {"prefix":[0,0,1],"tail_coeffs":[0.25,0],"tail_ratio":0.5}]})");
  ExperimentConfig c = parse_config(text);
  c.op = Operator::diagonal({}, {2.0, 1.0});
  const RunReport r = run(c);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_TRUE(r.results[0]["passed"].get<bool>());
}

TEST(Run, DegenerateWitnessIsAnError) {
  const std::string text =
      R"({"space":{"p":2},"operator":{"kind":"diagonal","prefix":[],"periodic":[0]},)"
      R"("experiment":"invariance_case","parameters":{"part":"b","epsilon":0.1,"delta":0.1,)"
      R"("witness":[{"prefix":[],"tail_coeffs":[1],"tail_ratio":0.5}]}})";
  const RunReport r = run(parse_config(text));
  EXPECT_FALSE(r.errors.empty());
  EXPECT_EQ(r.exit_code(), 2);
}

TEST(Run, ReportIsDeterministic) {
  const ExperimentConfig c = parse_config(
      with_parameters("construction_suite", R"({"epsilon":0.1,"c":1,"systems":3,"combinations":50,"seed":8})"));
  EXPECT_EQ(run(c).to_json().dump(2), run(c).to_json().dump(2));
}

TEST(Run, ReportFieldOrder) {
  const Json j = run(parse_config(std::string(kMinimal))).to_json();
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"tool", "version", "seed", "config", "results",
                                            "violations", "errors"}));
}

TEST(TestVectors, DiagonalSingularValues) {
  ExperimentConfig c = parse_config(std::string(
      R"({"space":{"p":2},"operator":{"kind":"diagonal","prefix":[1,2,3,4],"periodic":[0]},)"
      R"("experiment":"quantities","parameters":{"quantity":"Gamma","schedule":[[4,2]]}})"));
  const Json bundle = emit_test_vectors(c);
  bool seen = false;
  for (const auto& v : bundle["vectors"]) {
    if (v["name"] == "singular_values") {
      seen = true;
      const auto s = v["expected"].get<std::vector<double>>();
      ASSERT_EQ(s.size(), 4u);
      for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(s[i], 4.0 - static_cast<double>(i), 1e-12);
    }
    if (v["name"] == "operator_norm") {
      EXPECT_NEAR(v["expected"].get<double>(), 4.0, 1e-12);
    }
  }
  EXPECT_TRUE(seen);
  EXPECT_EQ(bundle.dump(), emit_test_vectors(c).dump());
}

TEST(TestVectors, IdentityTransferRatiosAreOne) {
  const ExperimentConfig c = parse_config(std::string(
      R"({"space":{"p":2},"operator":{"kind":"diagonal","prefix":[],"periodic":[1]},)"
      R"("experiment":"construction_suite","parameters":{"epsilon":0.1,"c":1,"seed":2}})"));
  const Json bundle = emit_test_vectors(c);
  std::size_t count = 0;
  for (const auto& v : bundle["vectors"]) {
    if (v["name"].get<std::string>() != "transfer_ratios") continue;
    ++count;
    EXPECT_NEAR(v["expected"]["ratio_z"].get<double>(), v["expected"]["ratio_Az"].get<double>(), 1e-12);
  }
  EXPECT_GT(count, 0u);
}

TEST(Seed, Precedence) {
  ::unsetenv("OPQUANT_SEED");
  EXPECT_EQ(resolve_seed(std::nullopt, 7), 7u);
  ::setenv("OPQUANT_SEED", "42", 1);
  EXPECT_EQ(resolve_seed(std::nullopt, 7), 42u);
  EXPECT_EQ(resolve_seed(5, 7), 5u);
  ::setenv("OPQUANT_SEED", "4x", 1);
  EXPECT_THROW((void)resolve_seed(std::nullopt, 7), Error);
  EXPECT_EQ(resolve_seed(5, 7), 5u);
  ::unsetenv("OPQUANT_SEED");
}

}  // namespace
}  // namespace opquant::cli
