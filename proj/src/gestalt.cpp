#include <utility>
#include <vector>

#include "arat/values.hpp"

namespace arat {

namespace {

struct Block {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t size = 0;
};

// Longest common substring of a and b; on equal length the match starting
// earliest in a wins, then earliest in b.
Block longest_match(std::string_view a, std::string_view b) {
  Block best;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      if (cur[j] > best.size) best = {i - cur[j], j - cur[j], cur[j]};
    }
    std::swap(prev, cur);
  }
  return best;
}

}  // namespace

std::size_t gestalt_matching_characters(std::string_view a, std::string_view b) {
  std::size_t matched = 0;
  std::vector<std::pair<std::string_view, std::string_view>> pending{{a, b}};
  while (!pending.empty()) {
    auto [x, y] = pending.back();
    pending.pop_back();
    if (x.empty() || y.empty()) continue;
    const Block m = longest_match(x, y);
    if (m.size == 0) continue;
    matched += m.size;
    pending.emplace_back(x.substr(0, m.a), y.substr(0, m.b));
    pending.emplace_back(x.substr(m.a + m.size), y.substr(m.b + m.size));
  }
  return matched;
}

double gestalt_similarity(std::string_view a, std::string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(gestalt_matching_characters(a, b)) / static_cast<double>(total);
}

}  // namespace arat
