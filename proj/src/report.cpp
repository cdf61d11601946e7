#include <cstdio>
#include <fstream>
#include <sstream>

#include "arat/runner.hpp"

namespace arat {

namespace {

Json config_json(const RunConfig& c) {
  Json j = Json::object();
  j["spec_path"] = c.spec_path.string();
  j["base_url"] = c.base_url;
  j["time_budget_s"] = c.time_budget_s;
  j["max_requests"] = c.max_requests ? Json(*c.max_requests) : Json(nullptr);
  j["seed"] = c.seed;
  j["alpha"] = c.agent.alpha;
  j["gamma"] = c.agent.gamma;
  j["epsilon"] = c.agent.epsilon;
  j["epsilon_max"] = c.agent.epsilon_max;
  j["epsilon_adapt"] = c.agent.epsilon_adapt;
  j["update_rule"] = std::string(to_string(c.agent.update_rule));
  j["sample_size"] = c.sample_size;
  j["timeout_ms"] = c.timeout_ms;
  j["memory_capacity"] = c.memory_capacity ? Json(*c.memory_capacity) : Json(nullptr);
  j["ablation"] = {{"no_prioritization", c.ablation.no_prioritization},
                   {"no_feedback", c.ablation.no_feedback},
                   {"no_sampling", c.ablation.no_sampling}};
  // Header values may carry credentials; only names are echoed.
  Json headers = Json::array();
  for (const auto& [name, value] : c.headers) headers.push_back(name);
  j["header_names"] = std::move(headers);
  return j;
}

}  // namespace

Json report_to_json(const TestReport& report) {
  Json j = Json::object();
  j["api_title"] = report.api_title;
  j["config"] = config_json(report.config);

  const auto& t = report.totals;
  j["totals"] = {{"operations_total", t.operations_total},
                 {"operations_covered", t.operations_covered},
                 {"requests", t.requests},
                 {"2xx", t.success_2xx},
                 {"4xx", t.client_4xx},
                 {"500", t.server_500},
                 {"other", t.other},
                 {"2xx_plus_500", t.success_or_500()},
                 {"transport_errors", t.transport_errors}};

  Json ops = Json::array();
  for (const auto& r : report.operations) {
    ops.push_back({{"operation_id", r.operation_id},
                   {"method", std::string(to_string(r.method))},
                   {"path", r.path},
                   {"requests", r.requests},
                   {"2xx", r.success_2xx},
                   {"4xx", r.client_4xx},
                   {"500", r.server_500},
                   {"other", r.other},
                   {"transport_errors", r.transport_errors},
                   {"covered", r.covered()},
                   {"first_2xx_seq", r.first_2xx_seq ? Json(*r.first_2xx_seq) : Json(nullptr)}});
  }
  j["operations"] = std::move(ops);

  Json faults = Json::array();
  for (const auto& f : report.unique_faults) {
    faults.push_back({{"digest", f.digest},
                      {"kind", std::string(to_string(f.kind))},
                      {"first_seen", f.first_seen},
                      {"occurrences", f.occurrences},
                      {"operation_id", f.operation_id},
                      {"method", std::string(to_string(f.method))},
                      {"url", f.url},
                      {"body", f.body ? Json(*f.body) : Json(nullptr)},
                      {"exemplar", f.exemplar}});
  }
  j["unique_faults"] = std::move(faults);

  const auto& s = report.stats;
  Json sources = Json::object();
  for (SourceId id : kAllSources) sources[std::string(to_string(id))] = s.source_selected[source_index(id)];
  j["stats"] = {{"value_fallbacks", s.value_fallbacks},
                {"unparsed_response_bodies", s.unparsed_response_bodies},
                {"request_pairs_stored", s.request_pairs_stored},
                {"response_pairs_stored", s.response_pairs_stored},
                {"source_selected", std::move(sources)},
                {"final_epsilon", s.final_epsilon}};

  j["timing"] = {{"wall_time_s", report.wall_time_s}, {"mean_latency_ms", report.mean_latency_ms}};
  return j;
}

void emit_report(const TestReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open report file " + path.string());
  out << report_to_json(report).dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("failed writing report file " + path.string());
}

std::string render_summary(const TestReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %7s %7s %7s %7s %7s\n", "operation", "reqs", "2xx",
                "4xx", "500", "other");
  out << line;
  for (const auto& r : report.operations) {
    std::string label = std::string(to_string(r.method)) + " " + r.operation_id;
    if (label.size() > 40) label = label.substr(0, 37) + "...";
    std::snprintf(line, sizeof line, "%-40s %7llu %7llu %7llu %7llu %7llu\n", label.c_str(),
                  static_cast<unsigned long long>(r.requests),
                  static_cast<unsigned long long>(r.success_2xx),
                  static_cast<unsigned long long>(r.client_4xx),
                  static_cast<unsigned long long>(r.server_500),
                  static_cast<unsigned long long>(r.other));
    out << line;
  }
  const auto& t = report.totals;
  out << "\noperations covered: " << t.operations_covered << "/" << t.operations_total << '\n'
      << "requests: " << t.requests << " (2xx " << t.success_2xx << ", 4xx " << t.client_4xx
      << ", 500 " << t.server_500 << ", other " << t.other << ")\n"
      << "2xx + 500: " << t.success_or_500() << '\n'
      << "unique faults: " << report.unique_faults.size() << '\n';
  std::snprintf(line, sizeof line, "wall time: %.1f s, mean latency: %.2f ms\n", report.wall_time_s,
                report.mean_latency_ms);
  out << line;
  return out.str();
}

}  // namespace arat
