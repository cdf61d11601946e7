#include <doctest.h>

#include <cmath>
#include <random>

#include "arat/agent.hpp"

using namespace arat;

namespace {

const std::string kDataDir = ARAT_TEST_DATA_DIR;

// Expanded forms of the two update rules, written independently of q_step.
double alg3_oracle(double old, int r, double mx, double a, double g) {
  return (1.0 - a * g) * old + a * r + a * g * mx;
}
double eq1_oracle(double old, int r, double mx, double a, double g) {
  return (1.0 - a) * old + a * r + a * g * mx;
}

ParameterSpec path_param(const std::string& name) {
  ParameterSpec p;
  p.name = name;
  p.location = ParamLocation::Path;
  p.required = true;
  return p;
}

OperationSpec op(const std::string& id, std::vector<std::string> params,
                 std::set<std::string> response_keys = {}) {
  OperationSpec o;
  o.operation_id = id;
  for (const auto& n : params) o.parameters.push_back(path_param(n));
  o.response_keys = std::move(response_keys);
  return o;
}

}  // namespace

TEST_CASE("features excerpt initial counts") {
  const ApiSpec spec = load_spec_file(kDataDir + "/features_excerpt.yaml");
  const AgentState s = initialize_qlearning(spec);
  CHECK(s.param_q("addFeatureToConfiguration", "productName") == 2.0);
  CHECK(s.param_q("addFeatureToConfiguration", "configurationName") == 2.0);
  CHECK(s.param_q("addFeatureToConfiguration", "featureName") == 1.0);
  CHECK(s.param_q("getConfigurationActivedFeatures", "productName") == 2.0);
  CHECK(s.param_q("getConfigurationActivedFeatures", "configurationName") == 2.0);
  for (const auto& [id, row] : s.q_value)
    for (double q : row) CHECK(q == 0.0);
  CHECK(s.alpha == 0.1);
  CHECK(s.gamma == 0.99);
  CHECK(s.epsilon == 0.1);
}

TEST_CASE("initialization edge cases") {
  SUBCASE("zero parameters") {
    ApiSpec spec;
    spec.operations.push_back(op("ping", {}));
    const AgentState s = initialize_qlearning(spec);
    CHECK(s.q_table.at("ping").empty());
    CHECK(s.q_value.at("ping") == SourceQValues{0, 0, 0, 0, 0});
  }
  SUBCASE("response key adds to a counted parameter") {
    ApiSpec spec;
    spec.operations.push_back(op("getItem", {"id"}));
    spec.operations.push_back(op("createItem", {}, {"id", "unrelated"}));
    const AgentState s = initialize_qlearning(spec);
    CHECK(s.param_q("getItem", "id") == 2.0);
    CHECK(s.q_table.at("createItem").empty());
  }
  SUBCASE("response key counted regardless of operation order") {
    ApiSpec spec;
    spec.operations.push_back(op("createItem", {}, {"id"}));
    spec.operations.push_back(op("getItem", {"id"}));
    CHECK(initialize_qlearning(spec).param_q("getItem", "id") == 2.0);
  }
  SUBCASE("empty spec") {
    CHECK_THROWS_AS(initialize_qlearning(ApiSpec{}), EmptySpec);
  }
}

TEST_CASE("q_step examples") {
  CHECK(q_step(UpdateRule::Alg3, 0.0, 1, 0.0, 0.1, 0.99) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(q_step(UpdateRule::Alg3, 5.0, -1, 5.0, 0.1, 0.99) == doctest::Approx(4.9).epsilon(1e-15));
}

TEST_CASE("q_step matches the oracle for both rules") {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double old = value(gen);
    const int r = gen() % 2 ? 1 : -1;
    const double mx = value(gen);
    const double a = 1.0 - unit(gen);  // (0, 1]
    const double g = unit(gen);        // [0, 1)
    CHECK(std::abs(q_step(UpdateRule::Alg3, old, r, mx, a, g) - alg3_oracle(old, r, mx, a, g)) <= 1e-12);
    CHECK(std::abs(q_step(UpdateRule::Eq1, old, r, mx, a, g) - eq1_oracle(old, r, mx, a, g)) <= 1e-12);
  }
}

TEST_CASE("failure rewards exceed success rewards") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> value(-100.0, 100.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double old = value(gen), mx = value(gen), a = 1.0 - unit(gen), g = unit(gen);
    for (auto rule : {UpdateRule::Alg3, UpdateRule::Eq1})
      CHECK(q_step(rule, old, 1, mx, a, g) > q_step(rule, old, -1, mx, a, g));
  }
}

TEST_CASE("q_update walks the parameters in order against the live row") {
  ApiSpec spec;
  spec.operations.push_back(op("a", {"x", "y", "z"}));
  spec.operations.push_back(op("b", {"x"}));
  AgentState s = initialize_qlearning(spec);
  s.q_table["a"] = {{"x", 1.0}, {"y", 3.0}, {"z", 0.5}};
  s.q_value["a"] = {0.0, 2.0, 0.0, 0.0, 0.0};
  const AgentState before = s;

  Outcome o{"a", {{"z", Json("v")}, {"x", Json(1)}}, SourceId::RequestMemory,
            StatusClass::ClientError4xx};
  q_update(s, o);

  const double z = alg3_oracle(0.5, 1, 3.0, 0.1, 0.99);
  const double x = alg3_oracle(1.0, 1, std::max(3.0, z), 0.1, 0.99);
  CHECK(s.q_table["a"]["z"] == doctest::Approx(z).epsilon(1e-14));
  CHECK(s.q_table["a"]["x"] == doctest::Approx(x).epsilon(1e-14));
  CHECK(s.q_table["a"]["y"] == 3.0);
  CHECK(s.q_value["a"][2] == doctest::Approx(alg3_oracle(0.0, 1, 2.0, 0.1, 0.99)).epsilon(1e-14));

  // Everything not selected is bit-identical.
  CHECK(s.q_table["b"] == before.q_table.at("b"));
  CHECK(s.q_value["b"] == before.q_value.at("b"));
  for (std::size_t i : {0u, 1u, 3u, 4u}) CHECK(s.q_value["a"][i] == before.q_value.at("a")[i]);
}

TEST_CASE("reward zero leaves the state unchanged") {
  ApiSpec spec;
  spec.operations.push_back(op("a", {"x"}));
  AgentState s = initialize_qlearning(spec);
  const AgentState before = s;
  q_update(s, Outcome{"a", {{"x", Json(1)}}, SourceId::Random, classify_status(302)});
  CHECK(s == before);
}

TEST_CASE("q_update rejects unknown operations") {
  ApiSpec spec;
  spec.operations.push_back(op("a", {"x"}));
  AgentState s = initialize_qlearning(spec);
  CHECK_THROWS_AS(q_update(s, Outcome{"nope", {}, SourceId::Random, StatusClass::Success2xx}),
                  UnknownOperation);
}

TEST_CASE("status classification and rewards") {
  for (int status = 100; status <= 599; ++status) {
    const StatusClass c = classify_status(status);
    if (status >= 200 && status <= 299) CHECK(c == StatusClass::Success2xx);
    else if (status >= 400 && status <= 499) CHECK(c == StatusClass::ClientError4xx);
    else if (status == 500) CHECK(c == StatusClass::ServerError500);
    else CHECK(c == StatusClass::Other);
  }
  CHECK(reward_for(StatusClass::Success2xx) == -1);
  CHECK(reward_for(StatusClass::ClientError4xx) == 1);
  CHECK(reward_for(StatusClass::ServerError500) == 1);
  CHECK(reward_for(StatusClass::Other) == 0);
  CHECK(classify_status(0) == StatusClass::Other);
}

TEST_CASE("adapt_epsilon") {
  AgentState s;
  s.epsilon = 0.1;
  adapt_epsilon(s);
  CHECK(s.epsilon == doctest::Approx(0.11).epsilon(1e-15));

  s.epsilon = 1.0;
  adapt_epsilon(s);
  CHECK(s.epsilon == 1.0);

  s.epsilon = 0.1;
  int steps = 0;
  double previous = s.epsilon;
  while (s.epsilon < 1.0) {
    adapt_epsilon(s);
    CHECK(s.epsilon >= previous);
    CHECK(s.epsilon <= s.epsilon_max);
    previous = s.epsilon;
    ++steps;
  }
  CHECK(steps == 25);
  adapt_epsilon(s);
  CHECK(s.epsilon == 1.0);
}

TEST_CASE("agent parameter domains") {
  CHECK_NOTHROW(validate(AgentParams{}));
  CHECK_THROWS(validate(AgentParams{0.0}));
  CHECK_THROWS(validate(AgentParams{0.1, 1.5}));
  CHECK_THROWS(validate(AgentParams{0.1, 0.99, 0.5, 0.4}));
  CHECK_THROWS(validate(AgentParams{0.1, 0.99, 0.1, 1.0, 0.9}));
}
