#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arat/agent.hpp"
#include "arat/json.hpp"
#include "arat/spec_model.hpp"
#include "arat/values.hpp"

namespace arat {

struct ParamAssignment {
  std::string name;
  ParamLocation location = ParamLocation::Query;
  Json value;
  ResolutionNote note;
};

struct RequestPlan {
  HttpMethod method = HttpMethod::Get;
  std::string absolute_url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::optional<std::string> body;
  std::string operation_id;
  std::vector<ParamAssignment> param_assignments;
};

class MissingPathParam : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// RFC 3986: everything but unreserved characters becomes %XX.
std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

/// Text form of a value in a path, query or header: strings verbatim,
/// arrays comma-joined, everything else as compact JSON.
std::string value_to_text(const Json& value);

/// Substitutes path values (percent-encoded), appends the query string, sets
/// header parameters, and serializes body properties as one JSON object
/// (form parameters become an urlencoded body when no body property is set).
/// Throws MissingPathParam when a placeholder has no assignment.
RequestPlan build_request(const OperationSpec& operation, std::vector<ParamAssignment> assignments,
                          std::string_view base_url, std::string_view base_path = {});

struct ResponseRecord {
  int status = 0;
  StatusClass status_class = StatusClass::Other;
  std::string body;
  std::string content_type;
  bool body_truncated = false;
  double latency_ms = 0.0;
  /// Transport failure tag: connection-refused, timeout, read-error, ...
  std::optional<std::string> error;
};

inline constexpr int kDefaultTimeoutMs = 10'000;
inline constexpr std::size_t kDefaultBodyCap = 1 << 20;

struct ExecutorOptions {
  int timeout_ms = kDefaultTimeoutMs;
  std::size_t body_cap = kDefaultBodyCap;
};

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path_and_query;  // starts with '/'
};

/// Accepts http:// and https:// URLs. Returns nullopt for anything else.
std::optional<ParsedUrl> parse_url(std::string_view url);

/// Sends plans one at a time, reusing keep-alive connections per origin.
/// Never throws for transport problems; they come back as ResponseRecord data.
class HttpExecutor {
 public:
  explicit HttpExecutor(ExecutorOptions options = {});
  ~HttpExecutor();
  HttpExecutor(const HttpExecutor&) = delete;
  HttpExecutor& operator=(const HttpExecutor&) = delete;

  ResponseRecord execute(const RequestPlan& plan);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience over HttpExecutor.
ResponseRecord execute(const RequestPlan& plan, int timeout_ms = kDefaultTimeoutMs);

}  // namespace arat
