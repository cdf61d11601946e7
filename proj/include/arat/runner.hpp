#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arat/agent.hpp"
#include "arat/executor.hpp"
#include "arat/faults.hpp"
#include "arat/json.hpp"
#include "arat/memory.hpp"
#include "arat/spec_model.hpp"

namespace arat {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AblationFlags {
  bool no_prioritization = false;
  bool no_feedback = false;
  bool no_sampling = false;
};

struct RunConfig {
  std::filesystem::path spec_path;
  std::string base_url;
  double time_budget_s = 3600.0;
  std::optional<std::uint64_t> max_requests;
  std::uint64_t seed = 0;
  AgentParams agent;
  std::size_t sample_size = kDefaultSampleSize;
  int timeout_ms = kDefaultTimeoutMs;
  AblationFlags ablation;
  std::vector<std::pair<std::string, std::string>> headers;
  std::optional<std::size_t> memory_capacity;
  std::optional<std::filesystem::path> report_path;
};

/// Throws ConfigError.
void validate(const RunConfig& config);

struct OperationRow {
  std::string operation_id;
  HttpMethod method = HttpMethod::Get;
  std::string path;
  std::uint64_t requests = 0;
  std::uint64_t success_2xx = 0;
  std::uint64_t client_4xx = 0;
  std::uint64_t server_500 = 0;
  std::uint64_t other = 0;
  std::uint64_t transport_errors = 0;  // subset of `other`
  std::optional<std::uint64_t> first_2xx_seq;

  /// Received at least one request answered with 2xx, 4xx or 500.
  bool covered() const { return success_2xx + client_4xx + server_500 > 0; }
};

struct ReportTotals {
  std::size_t operations_total = 0;
  std::size_t operations_covered = 0;
  std::uint64_t requests = 0;
  std::uint64_t success_2xx = 0;
  std::uint64_t client_4xx = 0;
  std::uint64_t server_500 = 0;
  std::uint64_t other = 0;
  std::uint64_t transport_errors = 0;

  std::uint64_t success_or_500() const { return success_2xx + server_500; }
};

struct FaultSummary {
  std::string digest;
  FingerprintKind kind = FingerprintKind::NormalizedText;
  std::uint64_t first_seen = 0;
  std::size_t occurrences = 0;
  std::string operation_id;
  HttpMethod method = HttpMethod::Get;
  std::string url;
  std::optional<std::string> body;
  std::string exemplar;
};

struct RunStats {
  std::uint64_t value_fallbacks = 0;
  std::uint64_t unparsed_response_bodies = 0;
  std::uint64_t request_pairs_stored = 0;
  std::uint64_t response_pairs_stored = 0;
  std::array<std::uint64_t, kSourceCount> source_selected{};
  double final_epsilon = 0.0;
};

struct TestReport {
  RunConfig config;
  std::string api_title;
  std::vector<OperationRow> operations;
  ReportTotals totals;
  std::vector<FaultSummary> unique_faults;
  RunStats stats;
  // Timing fields vary between otherwise identical runs.
  double wall_time_s = 0.0;
  double mean_latency_ms = 0.0;
};

/// What each loop iteration did; handed to the optional observer.
struct IterationTrace {
  std::uint64_t sequence = 0;  // 1-based request number
  std::string operation_id;
  SourceId source = SourceId::SpecExamples;
  const RequestPlan* plan = nullptr;
  const ResponseRecord* response = nullptr;
};

using IterationObserver = std::function<void(const IterationTrace&)>;

/// The testing loop: select operation, parameters and source, resolve values,
/// send, learn, remember, adapt epsilon; until the time budget or request cap
/// runs out. Per-request failures never abort the loop. Throws ConfigError.
TestReport run(const RunConfig& config, const ApiSpec& spec,
               const IterationObserver& observer = {});

/// Loads config.spec_path first. Throws SpecError or ConfigError.
TestReport run(const RunConfig& config);

/// Stable key order; identical reports serialize byte-identically.
Json report_to_json(const TestReport& report);

/// Throws std::runtime_error when the file cannot be written.
void emit_report(const TestReport& report, const std::filesystem::path& path);

/// Plain-text summary table derived from the same report.
std::string render_summary(const TestReport& report);

}  // namespace arat
