#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "arat/runner.hpp"
#include "arat/testbed.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSpec = 3;
constexpr int kExitIo = 4;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ARAT_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto seed = std::stoull(env, &used, 0);
      if (used == std::string(env).size()) return seed;
    } catch (const std::exception&) {
    }
    throw arat::ConfigError(std::string("ARAT_SEED is not an unsigned integer: '") + env + "'");
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

std::pair<std::string, std::string> parse_header(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0)
    throw arat::ConfigError("--header expects name:value, got '" + text + "'");
  std::string value = text.substr(colon + 1);
  const auto first = value.find_first_not_of(' ');
  value = first == std::string::npos ? "" : value.substr(first);
  return {text.substr(0, colon), value};
}

arat::testbed::FixtureServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arat: adaptive REST API testing with reinforcement learning"};
  app.require_subcommand(1);

  arat::RunConfig config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_requests;
  std::optional<std::size_t> memory_capacity;
  std::string update_rule = "alg3";
  std::vector<std::string> headers;
  std::string report_path;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Test a REST API described by an OpenAPI document");
  run->add_option("--spec", config.spec_path, "OpenAPI 2.0/3.x document (JSON or YAML)")->required();
  run->add_option("--base-url", config.base_url, "Base URL of the service under test")->required();
  run->add_option("--time-budget", config.time_budget_s, "Time budget in seconds")
      ->capture_default_str();
  run->add_option("--max-requests", max_requests, "Stop after this many requests");
  run->add_option("--seed", seed, "Random seed (default: $ARAT_SEED, else random)");
  run->add_option("--alpha", config.agent.alpha, "Learning rate")->capture_default_str();
  run->add_option("--gamma", config.agent.gamma, "Discount factor")->capture_default_str();
  run->add_option("--epsilon", config.agent.epsilon, "Initial exploration rate")->capture_default_str();
  run->add_option("--epsilon-max", config.agent.epsilon_max, "Exploration rate cap")
      ->capture_default_str();
  run->add_option("--epsilon-adapt", config.agent.epsilon_adapt, "Exploration growth factor")
      ->capture_default_str();
  run->add_option("--sample-size", config.sample_size, "Response pairs stored per response")
      ->capture_default_str();
  run->add_option("--timeout-ms", config.timeout_ms, "Per-request timeout")->capture_default_str();
  run->add_option("--update-rule", update_rule, "Q update formula")
      ->check(CLI::IsMember({"alg3", "eq1"}))
      ->capture_default_str();
  run->add_flag("--no-prioritization", config.ablation.no_prioritization,
                "Uniform random operation, parameter and source selection");
  run->add_flag("--no-feedback", config.ablation.no_feedback, "Never record request/response values");
  run->add_flag("--no-sampling", config.ablation.no_sampling, "Store every response pair");
  run->add_option("--header", headers, "Extra request header name:value (repeatable)");
  run->add_option("--memory-capacity", memory_capacity, "Bound each key-value store");
  run->add_option("--report", report_path, "Write the JSON report here");
  run->add_flag("--quiet", quiet, "Do not print the summary table");

  std::string fixture_name;
  int port = 0;
  std::uint64_t fixture_seed = 0;
  std::string write_spec;
  auto* bed = app.add_subcommand("testbed", "Serve one of the built-in mock services");
  bed->add_option("fixture", fixture_name, "features, faults or plaintext")->required();
  bed->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  bed->add_option("--seed", fixture_seed, "Seed for server-issued ids")->capture_default_str();
  bed->add_option("--write-spec", write_spec, "Write the fixture's OpenAPI document and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*bed) {
    try {
      const auto kind = arat::testbed::fixture_from_string(fixture_name);
      if (!write_spec.empty()) {
        std::ofstream out(write_spec);
        out << arat::testbed::openapi_document(kind) << '\n';
        if (!out) {
          std::cerr << "error: cannot write " << write_spec << '\n';
          return kExitIo;
        }
        return 0;
      }
      auto server = arat::testbed::FixtureServer::start(kind, fixture_seed, "127.0.0.1", port);
      g_server = server.get();
      std::signal(SIGINT, [](int) { g_server->shutdown(); });
      std::signal(SIGTERM, [](int) { g_server->shutdown(); });
      std::cout << "serving " << fixture_name << " on " << server->base_url() << std::endl;
      server->wait();
      return 0;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const arat::testbed::PortUnavailable& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitIo;
    }
  }

  try {
    config.seed = seed ? *seed : default_seed();
    config.max_requests = max_requests;
    config.memory_capacity = memory_capacity;
    config.agent.update_rule = update_rule == "eq1" ? arat::UpdateRule::Eq1 : arat::UpdateRule::Alg3;
    for (const auto& h : headers) config.headers.push_back(parse_header(h));
    if (!report_path.empty()) config.report_path = report_path;

    const arat::TestReport report = arat::run(config);
    if (config.report_path) arat::emit_report(report, *config.report_path);
    else if (quiet) std::cout << arat::report_to_json(report).dump(2) << '\n';
    if (!quiet) std::cout << arat::render_summary(report);
    return 0;
  } catch (const arat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const arat::SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return kExitSpec;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
