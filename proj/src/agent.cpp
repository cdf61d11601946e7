#include "arat/agent.hpp"

#include <algorithm>
#include <cmath>

namespace arat {

std::string_view to_string(SourceId source) {
  static constexpr std::array<std::string_view, kSourceCount> names = {"S1", "S2", "S3", "S4",
                                                                       "S5"};
  return names[source_index(source)];
}

std::string_view describe(SourceId source) {
  switch (source) {
    case SourceId::SpecExamples: return "spec examples";
    case SourceId::Random: return "random";
    case SourceId::RequestMemory: return "request memory";
    case SourceId::ResponseMemory: return "response memory";
    case SourceId::Defaults: return "defaults";
  }
  return "";
}

std::string_view to_string(StatusClass status_class) {
  switch (status_class) {
    case StatusClass::Success2xx: return "2xx";
    case StatusClass::ClientError4xx: return "4xx";
    case StatusClass::ServerError500: return "500";
    case StatusClass::Other: return "other";
  }
  return "other";
}

std::string_view to_string(UpdateRule rule) {
  return rule == UpdateRule::Alg3 ? "alg3" : "eq1";
}

void validate(const AgentParams& p) {
  auto in = [](double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; };
  if (!(std::isfinite(p.alpha) && p.alpha > 0.0 && p.alpha <= 1.0))
    throw std::invalid_argument("alpha must be in (0, 1]");
  if (!in(p.gamma, 0.0, 1.0)) throw std::invalid_argument("gamma must be in [0, 1]");
  if (!in(p.epsilon_max, 0.0, 1.0)) throw std::invalid_argument("epsilon-max must be in [0, 1]");
  if (!in(p.epsilon, 0.0, p.epsilon_max))
    throw std::invalid_argument("epsilon must be in [0, epsilon-max]");
  if (!(std::isfinite(p.epsilon_adapt) && p.epsilon_adapt >= 1.0))
    throw std::invalid_argument("epsilon-adapt must be >= 1");
}

double AgentState::param_q(const std::string& operation_id, const std::string& param_name) const {
  auto row = q_table.find(operation_id);
  if (row == q_table.end()) throw UnknownOperation("unknown operation: " + operation_id);
  auto cell = row->second.find(param_name);
  if (cell == row->second.end())
    throw std::out_of_range("unknown parameter " + param_name + " of " + operation_id);
  return cell->second;
}

AgentState initialize_qlearning(const ApiSpec& spec, const AgentParams& params) {
  if (spec.operations.empty()) throw EmptySpec("specification declares no operations");
  validate(params);

  AgentState state;
  state.alpha = params.alpha;
  state.gamma = params.gamma;
  state.epsilon = params.epsilon;
  state.epsilon_max = params.epsilon_max;
  state.epsilon_adapt = params.epsilon_adapt;
  state.update_rule = params.update_rule;

  std::map<std::string, double> counts;
  for (const auto& op : spec.operations) {
    for (const auto& param : op.parameters) counts[param.name] += 1.0;
  }
  for (const auto& op : spec.operations) {
    for (const auto& key : op.response_keys) {
      if (auto it = counts.find(key); it != counts.end()) it->second += 1.0;
    }
  }

  for (const auto& op : spec.operations) {
    state.q_value[op.operation_id].fill(0.0);
    auto& row = state.q_table[op.operation_id];
    for (const auto& param : op.parameters) row[param.name] = counts[param.name];
  }
  return state;
}

double q_step(UpdateRule rule, double old_value, int reward, double max_next, double alpha,
              double gamma) {
  const double r = static_cast<double>(reward);
  if (rule == UpdateRule::Alg3) return old_value + alpha * (r + gamma * (max_next - old_value));
  return old_value + alpha * (r + gamma * max_next - old_value);
}

void q_update(AgentState& state, const Outcome& outcome) {
  auto row_it = state.q_table.find(outcome.operation_id);
  auto src_it = state.q_value.find(outcome.operation_id);
  if (row_it == state.q_table.end() || src_it == state.q_value.end())
    throw UnknownOperation("unknown operation: " + outcome.operation_id);

  const int reward = outcome.reward();
  if (reward == 0) return;

  auto& row = row_it->second;
  for (const auto& [name, value] : outcome.selected_params) {
    auto cell = row.find(name);
    if (cell == row.end())
      throw std::out_of_range("unknown parameter " + name + " of " + outcome.operation_id);
    double max_next = cell->second;
    for (const auto& [_, q] : row) max_next = std::max(max_next, q);
    cell->second = q_step(state.update_rule, cell->second, reward, max_next, state.alpha,
                          state.gamma);
  }

  auto& sources = src_it->second;
  const double max_next = *std::max_element(sources.begin(), sources.end());
  double& cell = sources[source_index(outcome.selected_source)];
  cell = q_step(state.update_rule, cell, reward, max_next, state.alpha, state.gamma);
}

void adapt_epsilon(AgentState& state) {
  state.epsilon = std::min(state.epsilon_max, state.epsilon_adapt * state.epsilon);
}

}  // namespace arat
