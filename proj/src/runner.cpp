#include "arat/runner.hpp"

#include <chrono>
#include <cmath>

#include "arat/prioritizer.hpp"
#include "arat/rng.hpp"
#include "arat/values.hpp"

namespace arat {

void validate(const RunConfig& config) {
  if (!(std::isfinite(config.time_budget_s) && config.time_budget_s > 0))
    throw ConfigError("time budget must be a positive number of seconds");
  if (!parse_url(config.base_url))
    throw ConfigError("base URL must be an absolute http:// or https:// URL: '" + config.base_url + "'");
  if (config.sample_size == 0) throw ConfigError("sample size must be positive");
  if (config.timeout_ms <= 0) throw ConfigError("timeout must be positive");
  if (config.memory_capacity && *config.memory_capacity == 0)
    throw ConfigError("memory capacity must be positive");
  try {
    validate(config.agent);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

void count(OperationRow& row, const ResponseRecord& response, std::uint64_t sequence) {
  ++row.requests;
  switch (response.status_class) {
    case StatusClass::Success2xx:
      ++row.success_2xx;
      if (!row.first_2xx_seq) row.first_2xx_seq = sequence;
      break;
    case StatusClass::ClientError4xx: ++row.client_4xx; break;
    case StatusClass::ServerError500: ++row.server_500; break;
    case StatusClass::Other:
      ++row.other;
      if (response.error) ++row.transport_errors;
      break;
  }
}

ReportTotals sum_rows(const std::vector<OperationRow>& rows) {
  ReportTotals t;
  t.operations_total = rows.size();
  for (const auto& r : rows) {
    if (r.covered()) ++t.operations_covered;
    t.requests += r.requests;
    t.success_2xx += r.success_2xx;
    t.client_4xx += r.client_4xx;
    t.server_500 += r.server_500;
    t.other += r.other;
    t.transport_errors += r.transport_errors;
  }
  return t;
}

}  // namespace

TestReport run(const RunConfig& config, const ApiSpec& spec, const IterationObserver& observer) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();
  const auto budget = std::chrono::duration<double>(config.time_budget_s);

  AgentState state = initialize_qlearning(spec, config.agent);
  Rng rng(config.seed);
  KeyValueMemory memory(config.memory_capacity);
  FaultRegistry faults;
  HttpExecutor executor({config.timeout_ms, kDefaultBodyCap});
  const std::size_t sample_size = config.ablation.no_sampling ? kNoSampling : config.sample_size;
  const bool prioritize = !config.ablation.no_prioritization;

  TestReport report;
  report.config = config;
  report.api_title = spec.raw_title;
  for (const auto& op : spec.operations) {
    OperationRow row;
    row.operation_id = op.operation_id;
    row.method = op.method;
    row.path = op.path_template;
    report.operations.push_back(std::move(row));
  }

  std::uint64_t sequence = 0;
  double latency_total = 0.0;
  while (true) {
    if (config.max_requests && sequence >= *config.max_requests) break;
    if (std::chrono::steady_clock::now() - started >= budget) break;

    const OperationSpec& op =
        prioritize ? select_operation(state, spec) : select_operation_uniform(spec, rng);
    const std::size_t op_index = static_cast<std::size_t>(&op - spec.operations.data());
    const ParameterSelection selection =
        prioritize ? select_parameters(op, state, rng) : select_parameters_uniform(op, rng);
    const SourceChoice source =
        prioritize ? select_value_source(op, state, rng) : select_value_source_uniform(rng);
    ++report.stats.source_selected[source_index(source.source)];

    std::vector<ParamAssignment> assignments;
    std::vector<NamedValue> sent;
    for (std::size_t idx : selection.indices) {
      const ParameterSpec& param = op.parameters[idx];
      ResolvedValue resolved = resolve_value(param, source.source, memory, rng);
      if (resolved.note.fell_back()) ++report.stats.value_fallbacks;
      sent.emplace_back(param.name, resolved.value);
      assignments.push_back({param.name, param.location, std::move(resolved.value),
                             std::move(resolved.note)});
    }

    RequestPlan plan = build_request(op, std::move(assignments), config.base_url, spec.base_path);
    plan.headers.insert(plan.headers.end(), config.headers.begin(), config.headers.end());
    const ResponseRecord response = executor.execute(plan);
    ++sequence;
    latency_total += response.latency_ms;

    q_update(state, Outcome{op.operation_id, sent, source.source, response.status_class});

    if (!config.ablation.no_feedback && response.status_class == StatusClass::Success2xx) {
      report.stats.request_pairs_stored +=
          record_from_request(memory, op, sent, response.status_class);
      if (!response.body.empty()) {
        const auto rec =
            record_from_response(memory, response.body, response.content_type, sample_size, rng);
        if (!rec.parsed) ++report.stats.unparsed_response_bodies;
        report.stats.response_pairs_stored += rec.stored;
      }
    }

    if (response.status_class == StatusClass::ServerError500)
      faults.add(fingerprint(response, sequence), plan);

    adapt_epsilon(state);
    count(report.operations[op_index], response, sequence);

    if (observer) observer({sequence, op.operation_id, source.source, &plan, &response});
  }

  report.totals = sum_rows(report.operations);
  for (const auto& entry : faults.entries()) {
    FaultSummary s;
    s.digest = entry.fingerprint.digest;
    s.kind = entry.fingerprint.kind;
    s.first_seen = entry.fingerprint.first_seen;
    s.occurrences = entry.occurrences;
    s.operation_id = entry.reproducer.operation_id;
    s.method = entry.reproducer.method;
    s.url = entry.reproducer.absolute_url;
    s.body = entry.reproducer.body;
    s.exemplar = entry.fingerprint.exemplar;
    report.unique_faults.push_back(std::move(s));
  }
  report.stats.final_epsilon = state.epsilon;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  report.mean_latency_ms = sequence == 0 ? 0.0 : latency_total / static_cast<double>(sequence);
  return report;
}

TestReport run(const RunConfig& config) {
  validate(config);
  const ApiSpec spec = load_spec_file(config.spec_path);
  return run(config, spec);
}

}  // namespace arat
