#include "arat/prioritizer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace arat {

namespace {

// Required path parameters the draw left out are appended in spec order.
void append_missing_path_params(const OperationSpec& operation, ParameterSelection& selection) {
  for (std::size_t i = 0; i < operation.parameters.size(); ++i) {
    const auto& p = operation.parameters[i];
    if (p.location != ParamLocation::Path || !p.required) continue;
    if (std::find(selection.indices.begin(), selection.indices.end(), i) ==
        selection.indices.end())
      selection.indices.push_back(i);
  }
}

std::vector<std::size_t> partial_shuffle(std::size_t size, std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(size) - 1));
    std::swap(order[i], order[j]);
  }
  order.resize(n);
  return order;
}

}  // namespace

double operation_mean_q(const AgentState& state, const OperationSpec& operation) {
  if (operation.parameters.empty()) return 0.0;
  auto row = state.q_table.find(operation.operation_id);
  if (row == state.q_table.end()) throw UnknownOperation("unknown operation: " + operation.operation_id);
  double sum = 0.0;
  for (const auto& p : operation.parameters) {
    auto cell = row->second.find(p.name);
    if (cell != row->second.end()) sum += cell->second;
  }
  return sum / static_cast<double>(operation.parameters.size());
}

const OperationSpec& select_operation(const AgentState& state, const ApiSpec& spec) {
  if (spec.operations.empty()) throw EmptySpec("specification declares no operations");
  const OperationSpec* best = &spec.operations.front();
  double best_mean = -std::numeric_limits<double>::infinity();
  for (const auto& op : spec.operations) {
    const double mean = operation_mean_q(state, op);
    if (mean > best_mean) {
      best_mean = mean;
      best = &op;
    }
  }
  return *best;
}

ParameterSelection select_parameters(const OperationSpec& operation, const AgentState& state,
                                     Rng& rng) {
  if (operation.parameters.empty()) return {};
  const auto n = static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(operation.parameters.size())));
  return select_n_parameters(operation, state, n, rng);
}

ParameterSelection select_n_parameters(const OperationSpec& operation, const AgentState& state,
                                       std::size_t n, Rng& rng) {
  ParameterSelection selection;
  const std::size_t size = operation.parameters.size();
  selection.drawn_n = n = std::min(n, size);
  if (size == 0) return selection;

  selection.explored = rng.uniform_real() < state.epsilon;
  if (selection.explored) {
    selection.indices = partial_shuffle(size, n, rng);
  } else {
    const auto& row = state.q_table.at(operation.operation_id);
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return row.at(operation.parameters[a].name) > row.at(operation.parameters[b].name);
    });
    order.resize(n);
    selection.indices = std::move(order);
  }
  append_missing_path_params(operation, selection);
  return selection;
}

SourceChoice select_value_source(const OperationSpec& operation, const AgentState& state,
                                 Rng& rng) {
  SourceChoice choice;
  if (rng.uniform_real() < state.epsilon) {
    choice.explored = true;
    choice.source = kAllSources[rng.index(kSourceCount)];
    return choice;
  }
  auto it = state.q_value.find(operation.operation_id);
  if (it == state.q_value.end()) throw UnknownOperation("unknown operation: " + operation.operation_id);
  const auto& q = it->second;
  std::size_t best = 0;
  for (std::size_t s = 1; s < kSourceCount; ++s)
    if (q[s] > q[best]) best = s;
  choice.source = kAllSources[best];
  return choice;
}

const OperationSpec& select_operation_uniform(const ApiSpec& spec, Rng& rng) {
  if (spec.operations.empty()) throw EmptySpec("specification declares no operations");
  return spec.operations[rng.index(spec.operations.size())];
}

ParameterSelection select_parameters_uniform(const OperationSpec& operation, Rng& rng) {
  ParameterSelection selection;
  const std::size_t size = operation.parameters.size();
  if (size == 0) return selection;
  selection.drawn_n =
      static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(size)));
  selection.explored = true;
  selection.indices = partial_shuffle(size, selection.drawn_n, rng);
  append_missing_path_params(operation, selection);
  return selection;
}

SourceChoice select_value_source_uniform(Rng& rng) {
  return {kAllSources[rng.index(kSourceCount)], true};
}

}  // namespace arat
