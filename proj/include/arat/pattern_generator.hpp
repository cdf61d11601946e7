#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "arat/rng.hpp"

namespace arat {

/// Produces random strings matched by an ECMAScript regular expression.
/// Supports literals, escapes (\d \w \s and negations), classes with ranges
/// and negation, `.`, groups, alternation, and the usual quantifiers. Anchors
/// and \b are accepted and ignored. Unbounded repetition is capped at
/// min + kUnboundedExtra. Backreferences and lookaround throw
/// UnsatisfiablePattern.
class PatternGenerator {
 public:
  static constexpr int kUnboundedExtra = 8;

  explicit PatternGenerator(std::string_view pattern);
  ~PatternGenerator();
  PatternGenerator(PatternGenerator&&) noexcept;
  PatternGenerator& operator=(PatternGenerator&&) noexcept;

  std::string generate(Rng& rng) const;

  struct Node;

 private:
  std::unique_ptr<Node> root_;
};

}  // namespace arat
