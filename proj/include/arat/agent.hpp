#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arat/json.hpp"
#include "arat/spec_model.hpp"

namespace arat {

/// The five value-mapping sources, in index order S1..S5.
enum class SourceId : std::uint8_t {
  SpecExamples = 0,
  Random = 1,
  RequestMemory = 2,
  ResponseMemory = 3,
  Defaults = 4,
};

inline constexpr std::size_t kSourceCount = 5;
inline constexpr std::array<SourceId, kSourceCount> kAllSources = {
    SourceId::SpecExamples, SourceId::Random, SourceId::RequestMemory,
    SourceId::ResponseMemory, SourceId::Defaults};

constexpr std::size_t source_index(SourceId s) { return static_cast<std::size_t>(s); }
std::string_view to_string(SourceId source);  // "S1".."S5"
std::string_view describe(SourceId source);

enum class StatusClass { Success2xx, ClientError4xx, ServerError500, Other };

std::string_view to_string(StatusClass status_class);

/// 200-299 success, 400-499 client error, exactly 500 server error, anything
/// else (including transport failures reported as 0) is Other.
constexpr StatusClass classify_status(int status) {
  if (status >= 200 && status <= 299) return StatusClass::Success2xx;
  if (status >= 400 && status <= 499) return StatusClass::ClientError4xx;
  if (status == 500) return StatusClass::ServerError500;
  return StatusClass::Other;
}

/// Successes are discouraged (-1), failures encouraged (+1), anything else is
/// not learned from.
constexpr int reward_for(StatusClass status_class) {
  switch (status_class) {
    case StatusClass::Success2xx: return -1;
    case StatusClass::ClientError4xx:
    case StatusClass::ServerError500: return 1;
    case StatusClass::Other: return 0;
  }
  return 0;
}

enum class UpdateRule {
  Alg3,  // old + a * (r + g * (max_next - old))
  Eq1,   // old + a * (r + g * max_next - old)
};

std::string_view to_string(UpdateRule rule);

struct AgentParams {
  double alpha = 0.1;
  double gamma = 0.99;
  double epsilon = 0.1;
  double epsilon_max = 1.0;
  double epsilon_adapt = 1.1;
  UpdateRule update_rule = UpdateRule::Alg3;
};

/// Throws std::invalid_argument when a value is outside its domain.
void validate(const AgentParams& params);

using SourceQValues = std::array<double, kSourceCount>;

struct AgentState {
  double alpha = 0.1;
  double gamma = 0.99;
  double epsilon = 0.1;
  double epsilon_max = 1.0;
  double epsilon_adapt = 1.1;
  UpdateRule update_rule = UpdateRule::Alg3;

  // operation_id -> param_name -> Q
  std::map<std::string, std::map<std::string, double>> q_table;
  // operation_id -> Q per source, indexed by source_index()
  std::map<std::string, SourceQValues> q_value;

  double param_q(const std::string& operation_id, const std::string& param_name) const;

  bool operator==(const AgentState&) const = default;
};

struct Outcome {
  std::string operation_id;
  std::vector<std::pair<std::string, Json>> selected_params;
  SourceId selected_source = SourceId::SpecExamples;
  StatusClass status_class = StatusClass::Other;

  int reward() const { return reward_for(status_class); }
};

class UnknownOperation : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Builds the initial tables without touching the network. Every parameter
/// name counts 1 per occurrence across all operations; afterwards every
/// response key that names an already-counted parameter adds 1 more. Each
/// operation's row starts from those global counts. Throws EmptySpec.
AgentState initialize_qlearning(const ApiSpec& spec, const AgentParams& params = {});

/// One temporal-difference step. `max_next` is the largest value currently in
/// the row being updated.
double q_step(UpdateRule rule, double old_value, int reward, double max_next,
              double alpha, double gamma);

/// Applies the outcome to the selected operation's parameters (in order, each
/// reading the row as it stands) and to its selected source. Reward 0 is a
/// no-op. Throws UnknownOperation.
void q_update(AgentState& state, const Outcome& outcome);

/// epsilon <- min(epsilon_max, epsilon_adapt * epsilon)
void adapt_epsilon(AgentState& state);

}  // namespace arat
