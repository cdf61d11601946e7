#pragma once

#include <cstddef>
#include <vector>

#include "arat/agent.hpp"
#include "arat/rng.hpp"
#include "arat/spec_model.hpp"

namespace arat {

/// Mean of the operation's per-parameter Q-values; 0 for an operation without
/// parameters.
double operation_mean_q(const AgentState& state, const OperationSpec& operation);

/// Greedy: highest mean Q wins, earliest operation on ties. Consumes no
/// randomness. Throws EmptySpec on a spec without operations.
const OperationSpec& select_operation(const AgentState& state, const ApiSpec& spec);

struct ParameterSelection {
  /// Indices into operation.parameters, in selection order. Required path
  /// parameters the draw left out are appended at the end in spec order.
  std::vector<std::size_t> indices;
  std::size_t drawn_n = 0;
  bool explored = false;
};

/// RNG consumption: n = uniform_int(0, |params|), then select_n_parameters.
/// An operation without parameters consumes nothing.
ParameterSelection select_parameters(const OperationSpec& operation, const AgentState& state,
                                     Rng& rng);

/// RNG consumption: u = uniform_real(); u < epsilon explores with a partial
/// Fisher-Yates shuffle (for i in [0, n): j = uniform_int(i, |params|-1),
/// swap(i, j)) and takes the first n; otherwise takes the n highest Q-values,
/// stable in spec order, without further draws.
ParameterSelection select_n_parameters(const OperationSpec& operation, const AgentState& state,
                                       std::size_t n, Rng& rng);

struct SourceChoice {
  SourceId source = SourceId::SpecExamples;
  bool explored = false;
};

/// RNG consumption: u = uniform_real(); u < epsilon draws uniform_int(0, 4),
/// otherwise argmax of the operation's source Q-values (lowest index on ties).
SourceChoice select_value_source(const OperationSpec& operation, const AgentState& state,
                                 Rng& rng);

// Prioritization disabled: every choice is uniform.
const OperationSpec& select_operation_uniform(const ApiSpec& spec, Rng& rng);
ParameterSelection select_parameters_uniform(const OperationSpec& operation, Rng& rng);
SourceChoice select_value_source_uniform(Rng& rng);

}  // namespace arat
