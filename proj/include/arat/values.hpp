#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "arat/agent.hpp"
#include "arat/json.hpp"
#include "arat/rng.hpp"
#include "arat/spec_model.hpp"

namespace arat {

class KeyValueMemory;

/// Ratcliff/Obershelp: 2K / (|a| + |b|), K the number of characters matched by
/// taking the longest common substring (leftmost in `a`, then leftmost in `b`)
/// and recursing on both sides. Two empty strings are identical (1.0).
double gestalt_similarity(std::string_view a, std::string_view b);

/// K from the ratio above.
std::size_t gestalt_matching_characters(std::string_view a, std::string_view b);

class SourceEmpty : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsatisfiablePattern : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResolutionNote {
  SourceId requested = SourceId::SpecExamples;
  SourceId used = SourceId::SpecExamples;
  /// Matched memory key, or why a fallback happened.
  std::string detail;

  bool fell_back() const { return requested != used; }
};

struct ResolvedValue {
  Json value;
  ResolutionNote note;
};

/// S5 values: "string", 1.1, 1, [], {}; booleans default to true.
Json default_value(PrimitiveType type);

/// Alphanumeric string with length uniform in [min_len, max_len].
std::string random_alphanumeric(Rng& rng, std::size_t min_len, std::size_t max_len);

/// Constraint-respecting random value (S2). Throws UnsatisfiablePattern when
/// the pattern cannot be generated or cannot meet the length bounds.
Json random_value(const ParameterSpec& param, Rng& rng);

/// Draws from exactly one source. Throws SourceEmpty when that source has
/// nothing to offer for this parameter.
Json value_from_source(const ParameterSpec& param, SourceId source, const KeyValueMemory& memory,
                       Rng& rng, std::string* detail = nullptr);

/// value_from_source with fallback: requested -> S2 -> S5. A pattern S2 cannot
/// satisfy degrades to an unconstrained string before S5 is reached.
ResolvedValue resolve_value(const ParameterSpec& param, SourceId source,
                            const KeyValueMemory& memory, Rng& rng);

}  // namespace arat
