#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "arat/executor.hpp"

namespace arat {

enum class FingerprintKind { StackTrace, NormalizedText };

std::string_view to_string(FingerprintKind kind);

struct FaultFingerprint {
  FingerprintKind kind = FingerprintKind::NormalizedText;
  std::string digest;  // SHA-256 of the canonical text, lowercase hex
  std::uint64_t first_seen = 0;
  std::string exemplar;  // canonical text, truncated
};

inline constexpr std::size_t kExemplarLimit = 2048;

/// Hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Replaces volatile tokens (ISO-8601 timestamps, UUIDs, epoch integers of 10+
/// digits, hex tokens of 8+ characters) with fixed placeholders. Idempotent.
std::string normalize_text(std::string_view text);

/// Stack-trace lines (exception headers and JVM / Python / Go frame lines) of
/// a body, joined by '\n'. JSON bodies are searched through their string
/// values. nullopt when no trace is present.
std::optional<std::string> extract_stack_trace(std::string_view body);

/// Canonical identity of a 500 response: its normalized stack trace when present,
/// otherwise its normalized text (or the status line for an empty body).
FaultFingerprint fingerprint(const ResponseRecord& response, std::uint64_t sequence = 0);

struct FaultEntry {
  FaultFingerprint fingerprint;
  RequestPlan reproducer;
  std::size_t occurrences = 0;
};

class FaultRegistry {
 public:
  /// True exactly the first time a digest is seen.
  bool add(const FaultFingerprint& fp, const RequestPlan& context);

  const std::vector<FaultEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t total_occurrences() const { return total_; }

 private:
  std::vector<FaultEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_digest_;
  std::size_t total_ = 0;
};

}  // namespace arat
