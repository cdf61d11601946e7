#include "arat/memory.hpp"

#include "arat/values.hpp"

namespace arat {

void KvStore::append(std::string key, Json value, std::uint64_t stored_at) {
  entries_.push_back({std::move(key), std::move(value), stored_at});
  if (capacity_) {
    while (entries_.size() > *capacity_) entries_.pop_front();
  }
}

std::optional<KvMatch> KvStore::best_match(std::string_view name) const {
  std::optional<KvMatch> best;
  for (const auto& entry : entries_) {
    const double sim = gestalt_similarity(name, entry.key);
    if (!best || sim >= best->similarity) best = KvMatch{&entry, sim};
  }
  return best;
}

namespace {

void walk(const Json& node, const std::string* key, std::vector<NamedValue>& out) {
  if (node.is_object()) {
    for (const auto& [member, child] : node.items()) walk(child, &member, out);
  } else if (node.is_array()) {
    for (const auto& child : node) walk(child, key, out);
  } else if (key != nullptr) {
    out.emplace_back(*key, node);
  }
}

}  // namespace

std::vector<NamedValue> flatten(const Json& value) {
  std::vector<NamedValue> out;
  walk(value, nullptr, out);
  return out;
}

std::size_t record_from_request(KeyValueMemory& memory, const OperationSpec& /*operation*/,
                                std::span<const NamedValue> sent_params,
                                StatusClass status_class) {
  if (status_class != StatusClass::Success2xx) return 0;
  for (const auto& [name, value] : sent_params) memory.add_request_pair(name, value);
  return sent_params.size();
}

ResponseRecording record_from_response(KeyValueMemory& memory, std::string_view body,
                                       std::string_view /*content_type*/, std::size_t sample_size,
                                       Rng& rng) {
  ResponseRecording rec;
  Json parsed = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) return rec;
  rec.parsed = true;

  auto pairs = flatten(parsed);
  rec.flattened = pairs.size();
  if (pairs.size() <= sample_size) {
    for (auto& [k, v] : pairs) memory.add_response_pair(std::move(k), std::move(v));
    rec.stored = pairs.size();
    return rec;
  }

  // Selection sampling: item t is taken with probability (wanted) / (remaining).
  std::size_t wanted = sample_size;
  for (std::size_t t = 0; t < pairs.size() && wanted > 0; ++t) {
    const auto remaining = static_cast<double>(pairs.size() - t);
    if (remaining * rng.uniform_real() < static_cast<double>(wanted)) {
      memory.add_response_pair(std::move(pairs[t].first), std::move(pairs[t].second));
      --wanted;
      ++rec.stored;
    }
  }
  return rec;
}

}  // namespace arat
