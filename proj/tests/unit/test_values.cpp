#include <doctest.h>

#include <cmath>
#include <ctime>
#include <iomanip>
#include <random>
#include <regex>
#include <sstream>

#include "arat/memory.hpp"
#include "arat/pattern_generator.hpp"
#include "arat/values.hpp"

using namespace arat;

namespace {

ParameterSpec make(const std::string& name, PrimitiveType type) {
  ParameterSpec p;
  p.name = name;
  p.type = type;
  return p;
}

bool valid_calendar_date(const std::string& text) {
  std::tm tm{};
  std::istringstream in(text.substr(0, 10));
  in >> std::get_time(&tm, "%Y-%m-%d");
  if (in.fail()) return false;
  std::tm copy = tm;
  copy.tm_isdst = 0;
  if (timegm(&copy) == -1) return false;
  // timegm normalizes out-of-range days; a valid date survives unchanged.
  return copy.tm_mday == tm.tm_mday && copy.tm_mon == tm.tm_mon && copy.tm_year == tm.tm_year;
}

// Re-checks a value against its constraints without looking at the generator.
bool satisfies(const ParameterSpec& p, const Json& v) {
  const auto& c = p.constraints;
  if (c.enum_values && !c.enum_values->empty())
    return std::find(c.enum_values->begin(), c.enum_values->end(), v) != c.enum_values->end();
  switch (p.type) {
    case PrimitiveType::String: {
      if (!v.is_string()) return false;
      const auto s = v.get<std::string>();
      if (c.min_length && s.size() < *c.min_length) return false;
      if (c.max_length && s.size() > *c.max_length) return false;
      if (c.pattern && !std::regex_search(s, std::regex(*c.pattern))) return false;
      if (!c.pattern && !c.min_length && !c.max_length && !p.format && (s.empty() || s.size() > 20))
        return false;
      return true;
    }
    case PrimitiveType::Integer: {
      if (!v.is_number_integer()) return false;
      const double x = v.get<double>();
      return (!c.minimum || x >= *c.minimum) && (!c.maximum || x <= *c.maximum);
    }
    case PrimitiveType::Number: {
      if (!v.is_number()) return false;
      const double x = v.get<double>();
      return (!c.minimum || x >= *c.minimum) && (!c.maximum || x <= *c.maximum);
    }
    case PrimitiveType::Boolean: return v.is_boolean();
    case PrimitiveType::Array: return v.is_array();
    case PrimitiveType::Object: return v.is_object();
  }
  return false;
}

}  // namespace

TEST_CASE("S5 defaults") {
  KeyValueMemory memory;
  Rng rng(1);
  CHECK(value_from_source(make("a", PrimitiveType::String), SourceId::Defaults, memory, rng) == "string");
  CHECK(value_from_source(make("a", PrimitiveType::Number), SourceId::Defaults, memory, rng) == 1.1);
  CHECK(value_from_source(make("a", PrimitiveType::Integer), SourceId::Defaults, memory, rng) == 1);
  CHECK(value_from_source(make("a", PrimitiveType::Array), SourceId::Defaults, memory, rng) == Json::array());
  CHECK(value_from_source(make("a", PrimitiveType::Object), SourceId::Defaults, memory, rng) == Json::object());
  CHECK(value_from_source(make("a", PrimitiveType::Boolean), SourceId::Defaults, memory, rng) == true);
}

TEST_CASE("S3 picks the most similar request key") {
  KeyValueMemory memory;
  memory.add_request_pair("product_name", "X");
  memory.add_request_pair("configName", "Y");
  CHECK(gestalt_similarity("productName", "product_name") > gestalt_similarity("productName", "configName"));
  Rng rng(1);
  std::string detail;
  CHECK(value_from_source(make("productName", PrimitiveType::String), SourceId::RequestMemory, memory,
                          rng, &detail) == "X");
  CHECK(detail == "product_name");
}

TEST_CASE("memory ties go to the most recent entry") {
  KeyValueMemory memory;
  memory.add_response_pair("id", 1);
  memory.add_response_pair("id", 2);
  memory.add_response_pair("other", 3);
  Rng rng(1);
  CHECK(value_from_source(make("id", PrimitiveType::Integer), SourceId::ResponseMemory, memory, rng) == 2);
  // No cutoff: an unrelated key is still returned.
  KeyValueMemory lone;
  lone.add_response_pair("zzz", "v");
  CHECK(value_from_source(make("id", PrimitiveType::String), SourceId::ResponseMemory, lone, rng) == "v");
}

TEST_CASE("empty sources throw and resolve_value falls back") {
  KeyValueMemory memory;
  Rng rng(3);
  const auto p = make("name", PrimitiveType::String);
  CHECK_THROWS_AS(value_from_source(p, SourceId::SpecExamples, memory, rng), SourceEmpty);
  CHECK_THROWS_AS(value_from_source(p, SourceId::RequestMemory, memory, rng), SourceEmpty);
  CHECK_THROWS_AS(value_from_source(p, SourceId::ResponseMemory, memory, rng), SourceEmpty);

  for (auto source : {SourceId::SpecExamples, SourceId::RequestMemory, SourceId::ResponseMemory}) {
    const auto r = resolve_value(p, source, memory, rng);
    CHECK(r.note.requested == source);
    CHECK(r.note.used == SourceId::Random);
    CHECK(r.note.fell_back());
    CHECK(r.value.is_string());
  }
  const auto direct = resolve_value(p, SourceId::Defaults, memory, rng);
  CHECK_FALSE(direct.note.fell_back());
}

TEST_CASE("S1 picks uniformly among candidates") {
  auto p = make("color", PrimitiveType::String);
  p.example_candidates = {"red", "green", "blue"};
  KeyValueMemory memory;
  Rng rng(8);
  std::map<std::string, int> seen;
  for (int i = 0; i < 3000; ++i)
    ++seen[value_from_source(p, SourceId::SpecExamples, memory, rng).get<std::string>()];
  CHECK(seen.size() == 3);
  for (const auto& [_, n] : seen) CHECK(std::abs(n - 1000) < 3 * std::sqrt(3000 * (1.0 / 3) * (2.0 / 3)));
}

TEST_CASE("random_value examples") {
  Rng rng(5);
  auto pinned = make("n", PrimitiveType::Integer);
  pinned.constraints.minimum = 1;
  pinned.constraints.maximum = 1;
  CHECK(random_value(pinned, rng) == 1);

  auto two = make("code", PrimitiveType::String);
  two.constraints.pattern = "^[A-C]{2}$";
  const std::regex re("^[A-C]{2}$");
  for (int i = 0; i < 200; ++i) {
    const auto s = random_value(two, rng).get<std::string>();
    CHECK(s.size() == 2);
    CHECK(std::regex_match(s, re));
  }

  auto day = make("d", PrimitiveType::String);
  day.format = "date";
  auto stamp = make("t", PrimitiveType::String);
  stamp.format = "date-time";
  const std::regex date_time(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)");
  for (int i = 0; i < 500; ++i) {
    const auto d = random_value(day, rng).get<std::string>();
    CHECK(d.size() == 10);
    CHECK(valid_calendar_date(d));
    const auto t = random_value(stamp, rng).get<std::string>();
    CHECK(std::regex_match(t, date_time));
    CHECK(valid_calendar_date(t));
  }
}

TEST_CASE("unconstrained strings are alphanumeric, length 1 to 20") {
  Rng rng(6);
  const auto p = make("s", PrimitiveType::String);
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_value(p, rng).get<std::string>();
    CHECK(s.size() >= 1);
    CHECK(s.size() <= 20);
    CHECK(std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c); }));
  }
}

TEST_CASE("generated pattern strings match their pattern") {
  const char* patterns[] = {
      "^[a-z]+$",         "^\\d{3}-\\d{4}$",        "^(foo|bar|baz)[0-9]?$", "[A-Z][a-z]{2,5}",
      "^\\w+@\\w+\\.com$", "^[^0-9\\s]{4}$",         "^a.c$",                 "^(?:ab)+$",
      "^x{0,3}y*z+$",      "^[\\-+]?[0-9]+\\.[0-9]{2}$", "^#[0-9a-fA-F]{6}$",   "^\\u0041\\x42$"};
  Rng rng(10);
  for (const char* pattern : patterns) {
    PatternGenerator gen(pattern);
    const std::regex re(pattern);
    for (int i = 0; i < 100; ++i) {
      const std::string s = gen.generate(rng);
      INFO("pattern " << pattern << " produced [" << s << "]");
      CHECK(std::regex_search(s, re));
    }
  }
}

TEST_CASE("patterns that cannot be generated") {
  CHECK_THROWS_AS(PatternGenerator("(a)\\1"), UnsatisfiablePattern);
  CHECK_THROWS_AS(PatternGenerator("a(?=b)"), UnsatisfiablePattern);
  CHECK_THROWS_AS(PatternGenerator("[z-a]"), UnsatisfiablePattern);
  CHECK_THROWS_AS(PatternGenerator("(ab"), UnsatisfiablePattern);

  // Length bounds the pattern cannot meet fall back to an unconstrained string.
  auto p = make("code", PrimitiveType::String);
  p.constraints.pattern = "^[0-9]{3}$";
  p.constraints.max_length = 2;
  Rng rng(2);
  CHECK_THROWS_AS(random_value(p, rng), UnsatisfiablePattern);
  KeyValueMemory memory;
  const auto r = resolve_value(p, SourceId::Random, memory, rng);
  CHECK(r.value.is_string());
  CHECK(r.value.get<std::string>().size() <= 2);
}

TEST_CASE("random values satisfy their own constraints") {
  std::mt19937_64 gen(31337);
  const PrimitiveType types[] = {PrimitiveType::String, PrimitiveType::Integer, PrimitiveType::Number,
                                 PrimitiveType::Boolean, PrimitiveType::Array, PrimitiveType::Object};
  const char* patterns[] = {"^[a-f]{1,6}$", "^[0-9]+$", "^(yes|no)$", "^[A-Z]{2}[0-9]{2}$"};
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    ParameterSpec p = make("p", types[gen() % 6]);
    auto& c = p.constraints;
    switch (gen() % 4) {
      case 0:
        if (p.type == PrimitiveType::Integer) c.enum_values = std::vector<Json>{1, 5, 9};
        else c.enum_values = std::vector<Json>{"x", "y"};
        p.type = gen() % 2 ? p.type : PrimitiveType::String;
        break;
      case 1: {
        const double lo = static_cast<double>(static_cast<int>(gen() % 200) - 100);
        c.minimum = lo;
        c.maximum = lo + static_cast<double>(gen() % 50);
        break;
      }
      case 2:
        if (p.type == PrimitiveType::String) {
          c.min_length = gen() % 5;
          c.max_length = *c.min_length + gen() % 10;
        } else {
          c.minimum = static_cast<double>(gen() % 10);
        }
        break;
      default:
        if (p.type == PrimitiveType::String) c.pattern = patterns[gen() % 4];
        break;
    }
    const Json v = random_value(p, rng);
    INFO("type " << to_string(p.type) << " value " << v.dump());
    CHECK(satisfies(p, v));
  }
}
