#include "arat/values.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>

#include "arat/memory.hpp"
#include "arat/pattern_generator.hpp"

namespace arat {

namespace {

constexpr std::size_t kDefaultMaxStringLength = 20;
constexpr double kDefaultNumericSpan = 1000.0;
constexpr int kPatternAttempts = 32;

constexpr std::string_view kAlphanumeric =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

struct CompiledPattern {
  PatternGenerator generator;
  std::optional<std::regex> matcher;  // absent when std::regex rejects the syntax
};

// Compiled patterns are cached for the life of the process.
const CompiledPattern& compiled(const std::string& pattern) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const CompiledPattern>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(pattern); it != cache.end()) return *it->second;
  PatternGenerator generator(pattern);  // throws UnsatisfiablePattern
  std::optional<std::regex> matcher;
  try {
    matcher.emplace(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error&) {
  }
  auto entry = std::make_shared<const CompiledPattern>(
      CompiledPattern{std::move(generator), std::move(matcher)});
  return *cache.emplace(pattern, std::move(entry)).first->second;
}

std::string string_from_pattern(const ParameterSpec& param, Rng& rng) {
  const auto& c = param.constraints;
  const CompiledPattern& pattern = compiled(*c.pattern);
  for (int attempt = 0; attempt < kPatternAttempts; ++attempt) {
    std::string s = pattern.generator.generate(rng);
    if (c.min_length && s.size() < *c.min_length) continue;
    if (c.max_length && s.size() > *c.max_length) continue;
    if (pattern.matcher && !std::regex_search(s, *pattern.matcher)) continue;
    return s;
  }
  throw UnsatisfiablePattern("no string matching '" + *c.pattern + "' within the length bounds");
}

int days_in_month(int year, int month) {
  static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : days[month - 1];
}

std::string random_date(Rng& rng, bool with_time) {
  const auto year = static_cast<int>(rng.uniform_int(1970, 2037));
  const auto month = static_cast<int>(rng.uniform_int(1, 12));
  const auto day = static_cast<int>(rng.uniform_int(1, days_in_month(year, month)));
  char buf[32];
  if (!with_time) {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  } else {
    const auto h = static_cast<int>(rng.uniform_int(0, 23));
    const auto m = static_cast<int>(rng.uniform_int(0, 59));
    const auto s = static_cast<int>(rng.uniform_int(0, 59));
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", year, month, day, h, m, s);
  }
  return buf;
}

std::pair<double, double> numeric_range(const ValueConstraints& c, double default_lo,
                                        double default_hi) {
  if (c.minimum && c.maximum) return {*c.minimum, *c.maximum};
  if (c.minimum) return {*c.minimum, *c.minimum + kDefaultNumericSpan};
  if (c.maximum) return {*c.maximum - kDefaultNumericSpan, *c.maximum};
  return {default_lo, default_hi};
}

Json random_string_value(const ParameterSpec& param, Rng& rng) {
  const auto& c = param.constraints;
  if (c.pattern) return string_from_pattern(param, rng);
  if (param.format == "date") return random_date(rng, false);
  if (param.format == "date-time") return random_date(rng, true);
  const std::size_t lo = c.min_length.value_or(1);
  const std::size_t hi = c.max_length.value_or(std::max(lo, kDefaultMaxStringLength));
  return random_alphanumeric(rng, lo, hi);
}

}  // namespace

Json default_value(PrimitiveType type) {
  switch (type) {
    case PrimitiveType::String: return "string";
    case PrimitiveType::Number: return 1.1;
    case PrimitiveType::Integer: return 1;
    case PrimitiveType::Boolean: return true;
    case PrimitiveType::Array: return Json::array();
    case PrimitiveType::Object: return Json::object();
  }
  return "string";
}

std::string random_alphanumeric(Rng& rng, std::size_t min_len, std::size_t max_len) {
  const auto len = static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::int64_t>(min_len), static_cast<std::int64_t>(max_len)));
  std::string s(len, ' ');
  for (auto& ch : s) ch = kAlphanumeric[rng.index(kAlphanumeric.size())];
  return s;
}

Json random_value(const ParameterSpec& param, Rng& rng) {
  const auto& c = param.constraints;
  if (c.enum_values && !c.enum_values->empty())
    return (*c.enum_values)[rng.index(c.enum_values->size())];

  switch (param.type) {
    case PrimitiveType::String:
      return random_string_value(param, rng);
    case PrimitiveType::Integer: {
      auto [lo, hi] = numeric_range(c, -kDefaultNumericSpan, kDefaultNumericSpan);
      const auto ilo = static_cast<std::int64_t>(std::ceil(lo));
      const auto ihi = static_cast<std::int64_t>(std::floor(hi));
      if (ilo > ihi) return ilo;  // no integer inside a fractional range
      return rng.uniform_int(ilo, ihi);
    }
    case PrimitiveType::Number: {
      auto [lo, hi] = numeric_range(c, -kDefaultNumericSpan, kDefaultNumericSpan);
      return lo + (hi - lo) * rng.uniform_real();
    }
    case PrimitiveType::Boolean:
      return rng.uniform_int(0, 1) == 1;
    case PrimitiveType::Array: {
      Json out = Json::array();
      const auto n = rng.uniform_int(1, 3);
      for (std::int64_t i = 0; i < n; ++i) out.push_back(random_alphanumeric(rng, 1, 10));
      return out;
    }
    case PrimitiveType::Object: {
      Json out = Json::object();
      out[random_alphanumeric(rng, 1, 10)] = random_alphanumeric(rng, 1, 10);
      return out;
    }
  }
  return random_alphanumeric(rng, 1, kDefaultMaxStringLength);
}

Json value_from_source(const ParameterSpec& param, SourceId source, const KeyValueMemory& memory,
                       Rng& rng, std::string* detail) {
  switch (source) {
    case SourceId::SpecExamples:
      if (param.example_candidates.empty()) throw SourceEmpty("no example values for " + param.name);
      return param.example_candidates[rng.index(param.example_candidates.size())];
    case SourceId::Random:
      return random_value(param, rng);
    case SourceId::RequestMemory:
    case SourceId::ResponseMemory: {
      const KvStore& store = source == SourceId::RequestMemory ? memory.request_pairs()
                                                               : memory.response_pairs();
      auto match = store.best_match(param.name);
      if (!match) throw SourceEmpty(std::string(describe(source)) + " is empty");
      if (detail) *detail = match->entry->key;
      return match->entry->value;
    }
    case SourceId::Defaults:
      return default_value(param.type);
  }
  return default_value(param.type);
}

ResolvedValue resolve_value(const ParameterSpec& param, SourceId source,
                            const KeyValueMemory& memory, Rng& rng) {
  ResolvedValue out;
  out.note.requested = source;
  try {
    out.note.used = source;
    out.value = value_from_source(param, source, memory, rng, &out.note.detail);
    return out;
  } catch (const SourceEmpty& e) {
    out.note.detail = e.what();
  } catch (const UnsatisfiablePattern& e) {
    out.note.detail = e.what();
  }

  out.note.used = SourceId::Random;
  if (source != SourceId::Random) {
    try {
      out.value = random_value(param, rng);
      return out;
    } catch (const UnsatisfiablePattern& e) {
      out.note.detail = e.what();
    }
  }
  try {
    ParameterSpec relaxed = param;
    relaxed.constraints.pattern.reset();
    out.value = random_value(relaxed, rng);
    out.note.detail += "; pattern dropped";
    return out;
  } catch (const UnsatisfiablePattern&) {
  }
  out.note.used = SourceId::Defaults;
  out.value = default_value(param.type);
  return out;
}

}  // namespace arat
