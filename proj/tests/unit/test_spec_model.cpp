#include <doctest.h>

#include <algorithm>
#include <random>
#include <regex>
#include <sstream>

#include "arat/spec_model.hpp"
#include "arat/testbed.hpp"

using namespace arat;

namespace {

const std::string kDataDir = ARAT_TEST_DATA_DIR;

const ParameterSpec& param(const OperationSpec& op, const std::string& name) {
  auto it = std::find_if(op.parameters.begin(), op.parameters.end(),
                         [&](const auto& p) { return p.name == name; });
  REQUIRE(it != op.parameters.end());
  return *it;
}

// Independent tokenizer: whitespace words with quotes trimmed, plus "..." spans.
std::vector<std::string> naive_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream words(text);
  std::string w;
  while (words >> w) {
    auto b = w.find_first_not_of("\"'");
    auto e = w.find_last_not_of("\"'");
    if (b != std::string::npos) out.push_back(w.substr(b, e - b + 1));
  }
  std::regex quoted("\"([^\"]*)\"");
  for (std::sregex_iterator it(text.begin(), text.end(), quoted), end; it != end; ++it)
    if ((*it)[1].length() > 0) out.push_back((*it)[1]);
  return out;
}

}  // namespace

TEST_CASE("features excerpt document parses into two operations") {
  const ApiSpec spec = load_spec_file(kDataDir + "/features_excerpt.yaml");
  REQUIRE(spec.operations.size() == 2);

  const auto& post = spec.operations[0];
  CHECK(post.operation_id == "addFeatureToConfiguration");
  CHECK(post.method == HttpMethod::Post);
  CHECK(post.parameters.size() == 3);
  for (const auto& p : post.parameters) {
    CHECK(p.location == ParamLocation::Path);
    CHECK(p.required);
    CHECK(p.type == PrimitiveType::String);
  }
  CHECK(post.response_keys.empty());

  const auto& get = spec.operations[1];
  CHECK(get.operation_id == "getConfigurationActivedFeatures");
  CHECK(get.method == HttpMethod::Get);
  CHECK(get.parameters.size() == 2);
  CHECK(get.response_keys.empty());
  CHECK(spec.raw_title == "Features Service");
  CHECK(spec.base_path.empty());
}

TEST_CASE("response keys come from declared object properties") {
  const char* doc = R"({
    "openapi": "3.0.0", "info": {"title": "t", "version": "1"},
    "paths": {"/items": {"get": {"operationId": "listItems", "responses": {"200": {
      "description": "ok",
      "content": {"application/json": {"schema": {"type": "object",
        "properties": {"id": {"type": "integer"}, "name": {"type": "string"}}}}}}}}}}})";
  const ApiSpec spec = parse_spec(doc);
  REQUIRE(spec.operations.size() == 1);
  CHECK(spec.operations[0].response_keys == std::set<std::string>{"id", "name"});
}

TEST_CASE("malformed, unsupported and empty documents") {
  CHECK_THROWS_AS(parse_spec("{\"openapi\": "), MalformedDocument);
  CHECK_THROWS_AS(parse_spec("key: [unclosed", FormatHint::Yaml), MalformedDocument);
  CHECK_THROWS_AS(parse_spec(R"({"info": {"title": "x"}, "paths": {}})"), UnsupportedVersion);
  CHECK_THROWS_AS(parse_spec(R"({"swagger": "1.2", "paths": {}})"), UnsupportedVersion);
  CHECK_THROWS_AS(parse_spec(R"({"openapi": "3.0.0", "paths": {}})"), EmptySpec);
  CHECK_THROWS_AS(parse_spec("swagger: '2.0'\npaths: {}\n"), EmptySpec);
  CHECK_THROWS_AS(load_spec_file("/nonexistent/spec.yaml"), SpecError);
}

TEST_CASE("extract_spec_examples ordering") {
  SUBCASE("enum then example") {
    Json node = {{"name", "x"}, {"enum", {"A", "B"}}, {"example", "C"}};
    CHECK(extract_spec_examples(node) == std::vector<Json>{"A", "B", "C"});
  }
  SUBCASE("description words and quoted phrase") {
    Json node = {{"name", "city"}, {"description", "use \"New York\" or Boston"}};
    auto got = extract_spec_examples(node);
    for (const char* want : {"New York", "use", "or", "Boston"})
      CHECK(std::find(got.begin(), got.end(), Json(want)) != got.end());
    for (const auto& v : got) CHECK(v.get<std::string>().find('"') == std::string::npos);
  }
  SUBCASE("nothing to mine") {
    CHECK(extract_spec_examples(Json{{"name", "q"}, {"in", "query"}}).empty());
  }
  SUBCASE("duplicates keep first position") {
    Json node = {{"enum", {"a", "b"}}, {"example", "a"}, {"description", "b c"}};
    CHECK(extract_spec_examples(node) == std::vector<Json>{"a", "b", "c"});
  }
  SUBCASE("schema examples in OpenAPI 3 parameters") {
    Json node = {{"name", "n"}, {"schema", {{"type", "integer"}, {"enum", {1, 2}}, {"example", 3}}}};
    CHECK(extract_spec_examples(node) == std::vector<Json>{1, 2, 3});
  }
}

TEST_CASE("single-quoted phrases") {
  auto tokens = description_tokens("pick 'dark mode' or it's fine");
  CHECK(std::find(tokens.begin(), tokens.end(), "dark mode") != tokens.end());
  CHECK(std::find(tokens.begin(), tokens.end(), "it's") != tokens.end());
}

TEST_CASE("description tokenizer agrees with a naive oracle on double quotes") {
  std::mt19937 gen(7);
  const std::string alphabet = "ab \"";
  for (int round = 0; round < 500; ++round) {
    std::string text;
    const int len = std::uniform_int_distribution<int>(0, 20)(gen);
    for (int i = 0; i < len; ++i) text.push_back(alphabet[gen() % alphabet.size()]);
    auto got = description_tokens(text);
    auto want = naive_tokens(text);
    for (const auto& w : want) {
      INFO("text=[" << text << "] token=[" << w << "]");
      CHECK(std::find(got.begin(), got.end(), w) != got.end());
    }
  }
}

TEST_CASE("mined examples are substrings of the description") {
  std::mt19937 gen(11);
  const std::string alphabet = "ab \"'\t.,";
  for (int round = 0; round < 2000; ++round) {
    std::string text;
    const int len = std::uniform_int_distribution<int>(0, 30)(gen);
    for (int i = 0; i < len; ++i) text.push_back(alphabet[gen() % alphabet.size()]);
    for (const auto& t : description_tokens(text)) {
      INFO("text=[" << text << "] token=[" << t << "]");
      CHECK_FALSE(t.empty());
      CHECK(text.find(t) != std::string::npos);
    }
  }
}

TEST_CASE("path placeholders always get a path parameter") {
  const char* doc = R"({"swagger": "2.0", "info": {"title": "t", "version": "1"}, "paths": {
    "/a/{x}/b/{y}": {"get": {"parameters": [{"name": "x", "in": "path", "required": true, "type": "string"}],
                            "responses": {"200": {"description": "ok"}}}}}})";
  const ApiSpec spec = parse_spec(doc);
  const auto& op = spec.operations[0];
  CHECK(op.operation_id == "get_a_x_b_y");
  for (const auto& name : path_placeholders(op.path_template)) {
    const auto& p = param(op, name);
    CHECK(p.location == ParamLocation::Path);
    CHECK(p.required);
  }
}

TEST_CASE("substituting every placeholder leaves no braces") {
  for (auto kind : {testbed::FixtureKind::Features, testbed::FixtureKind::Faults,
                    testbed::FixtureKind::PlainText}) {
    const ApiSpec spec = parse_spec(testbed::openapi_document(kind));
    for (const auto& op : spec.operations) {
      std::string path = op.path_template;
      for (const auto& name : path_placeholders(path)) {
        const std::string ph = "{" + name + "}";
        for (auto pos = path.find(ph); pos != std::string::npos; pos = path.find(ph))
          path.replace(pos, ph.size(), "v");
      }
      CHECK(path.find('{') == std::string::npos);
      CHECK(path.find('}') == std::string::npos);
    }
  }
}

TEST_CASE("duplicate operation ids are made unique") {
  const char* doc = R"({"openapi": "3.0.0", "info": {"title": "t", "version": "1"}, "paths": {
    "/a": {"get": {"operationId": "same", "responses": {}}},
    "/b": {"get": {"operationId": "same", "responses": {}}}}})";
  const ApiSpec spec = parse_spec(doc);
  REQUIRE(spec.operations.size() == 2);
  CHECK(spec.operations[0].operation_id != spec.operations[1].operation_id);
}

TEST_CASE("OpenAPI 2 body and OpenAPI 3 requestBody flatten one level") {
  const char* v2 = R"({"swagger": "2.0", "info": {"title": "t", "version": "1"},
    "definitions": {"Pet": {"type": "object", "required": ["name"],
      "properties": {"name": {"type": "string"}, "age": {"type": "integer", "minimum": 0},
                     "tag": {"type": "object", "properties": {"k": {"type": "string"}}}}}},
    "paths": {"/pets": {"post": {"operationId": "addPet",
      "parameters": [{"name": "body", "in": "body", "schema": {"$ref": "#/definitions/Pet"}}],
      "responses": {"201": {"description": "ok", "schema": {"$ref": "#/definitions/Pet"}}}}}}})";
  const ApiSpec s2 = parse_spec(v2);
  const auto& op = s2.operations[0];
  REQUIRE(op.parameters.size() == 3);
  CHECK(param(op, "name").location == ParamLocation::BodyProperty);
  CHECK(param(op, "name").required);
  CHECK_FALSE(param(op, "age").required);
  CHECK(param(op, "age").constraints.minimum == 0.0);
  CHECK(param(op, "tag").type == PrimitiveType::Object);
  CHECK(op.response_keys == std::set<std::string>{"age", "name", "tag"});

  const ApiSpec s3 = parse_spec(testbed::openapi_document(testbed::FixtureKind::Features));
  const auto* create = s3.find("createConfiguration");
  REQUIRE(create != nullptr);
  CHECK(param(*create, "configurationName").location == ParamLocation::BodyProperty);
}

TEST_CASE("YAML scalars keep their declared types") {
  const char* doc =
      "openapi: 3.0.0\n"
      "info: {title: t, version: '1'}\n"
      "paths:\n"
      "  /x:\n"
      "    get:\n"
      "      parameters:\n"
      "        - name: n\n"
      "          in: query\n"
      "          schema: {type: integer, minimum: 1, maximum: 5, example: 3}\n"
      "        - name: code\n"
      "          in: query\n"
      "          schema: {type: string, example: '007', enum: ['007', '042']}\n"
      "      responses: {'200': {description: ok}}\n";
  const ApiSpec spec = parse_spec(doc);
  const auto& op = spec.operations[0];
  CHECK(param(op, "n").type == PrimitiveType::Integer);
  CHECK(param(op, "n").constraints.minimum == 1.0);
  CHECK(param(op, "n").constraints.maximum == 5.0);
  CHECK(param(op, "n").example_candidates == std::vector<Json>{3});
  CHECK(param(op, "code").example_candidates == std::vector<Json>{"007", "042"});
}

TEST_CASE("parsing is deterministic") {
  const std::string doc = testbed::openapi_document(testbed::FixtureKind::Features);
  CHECK(parse_spec(doc) == parse_spec(doc));
  CHECK(load_spec_file(kDataDir + "/features_excerpt.yaml") ==
        load_spec_file(kDataDir + "/features_excerpt.yaml"));
}
