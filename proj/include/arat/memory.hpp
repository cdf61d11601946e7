#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arat/agent.hpp"
#include "arat/json.hpp"
#include "arat/rng.hpp"
#include "arat/spec_model.hpp"

namespace arat {

struct KvEntry {
  std::string key;
  Json value;
  std::uint64_t stored_at = 0;  // logical clock, strictly increasing
};

struct KvMatch {
  const KvEntry* entry = nullptr;
  double similarity = 0.0;
};

/// Insertion-ordered multimap. With a capacity, the oldest entries are evicted.
class KvStore {
 public:
  explicit KvStore(std::optional<std::size_t> capacity = std::nullopt) : capacity_(capacity) {}

  void append(std::string key, Json value, std::uint64_t stored_at);

  /// Entry whose key is most similar to `name` (gestalt ratio); the most
  /// recently stored wins ties. No similarity cutoff.
  std::optional<KvMatch> best_match(std::string_view name) const;

  const std::deque<KvEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::optional<std::size_t> capacity_;
  std::deque<KvEntry> entries_;
};

class KeyValueMemory {
 public:
  explicit KeyValueMemory(std::optional<std::size_t> capacity = std::nullopt)
      : request_pairs_(capacity), response_pairs_(capacity) {}

  const KvStore& request_pairs() const { return request_pairs_; }
  const KvStore& response_pairs() const { return response_pairs_; }

  void add_request_pair(std::string key, Json value) {
    request_pairs_.append(std::move(key), std::move(value), ++clock_);
  }
  void add_response_pair(std::string key, Json value) {
    response_pairs_.append(std::move(key), std::move(value), ++clock_);
  }

 private:
  KvStore request_pairs_;
  KvStore response_pairs_;
  std::uint64_t clock_ = 0;
};

using NamedValue = std::pair<std::string, Json>;

/// Leaf pairs of a JSON document. A leaf is keyed by the nearest enclosing
/// object member name; array indices never contribute, and scalars with no
/// enclosing member (top-level scalars and arrays of them) are dropped.
std::vector<NamedValue> flatten(const Json& value);

/// On success, every sent pair is appended to the request store. Returns the
/// number of pairs stored.
std::size_t record_from_request(KeyValueMemory& memory, const OperationSpec& operation,
                                std::span<const NamedValue> sent_params,
                                StatusClass status_class);

inline constexpr std::size_t kDefaultSampleSize = 10;
inline constexpr std::size_t kNoSampling = std::numeric_limits<std::size_t>::max();

struct ResponseRecording {
  bool parsed = false;
  std::size_t flattened = 0;
  std::size_t stored = 0;
};

/// Flattens a JSON body and stores all pairs, or a uniform sample of exactly
/// `sample_size` when there are more. Sampling uses selection sampling
/// (one uniform_real per candidate until the sample is full) so stored pairs
/// keep document order. Bodies that are not JSON store nothing.
ResponseRecording record_from_response(KeyValueMemory& memory, std::string_view body,
                                       std::string_view content_type, std::size_t sample_size,
                                       Rng& rng);

}  // namespace arat
