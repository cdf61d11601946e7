#include "arat/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>

#include <httplib.h>

namespace arat {

std::string percent_encode(std::string_view text) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size() && nibble(text[i + 1]) >= 0 &&
        nibble(text[i + 2]) >= 0) {
      out.push_back(static_cast<char>(nibble(text[i + 1]) * 16 + nibble(text[i + 2])));
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

std::string value_to_text(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string out;
    for (const auto& item : value) {
      if (!out.empty()) out += ',';
      out += value_to_text(item);
    }
    return out;
  }
  return value.dump();
}

namespace {

std::string header_safe(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\r' || c == '\n'; }, ' ');
  return s;
}

std::string join_url(std::string_view base_url, std::string_view base_path, std::string_view path) {
  std::string url(base_url);
  while (!url.empty() && url.back() == '/') url.pop_back();
  if (!base_path.empty()) {
    if (base_path.front() != '/') url += '/';
    url += base_path;
    while (!url.empty() && url.back() == '/') url.pop_back();
  }
  if (path.empty() || path.front() != '/') url += '/';
  url += path;
  return url;
}

}  // namespace

RequestPlan build_request(const OperationSpec& operation, std::vector<ParamAssignment> assignments,
                          std::string_view base_url, std::string_view base_path) {
  RequestPlan plan;
  plan.method = operation.method;
  plan.operation_id = operation.operation_id;

  // Everything is emitted in spec order regardless of selection order.
  auto spec_rank = [&](const ParamAssignment& a) {
    for (std::size_t i = 0; i < operation.parameters.size(); ++i) {
      const auto& p = operation.parameters[i];
      if (p.name == a.name && p.location == a.location) return i;
    }
    return operation.parameters.size();
  };
  std::stable_sort(assignments.begin(), assignments.end(),
                   [&](const auto& x, const auto& y) { return spec_rank(x) < spec_rank(y); });

  std::string path = operation.path_template;
  for (const auto& name : path_placeholders(operation.path_template)) {
    auto it = std::find_if(assignments.begin(), assignments.end(), [&](const auto& a) {
      return a.location == ParamLocation::Path && a.name == name;
    });
    if (it == assignments.end())
      throw MissingPathParam("no value for path parameter '" + name + "' of " +
                             operation.operation_id);
    const std::string placeholder = "{" + name + "}";
    const std::string encoded = percent_encode(value_to_text(it->value));
    for (auto pos = path.find(placeholder); pos != std::string::npos;
         pos = path.find(placeholder, pos + encoded.size()))
      path.replace(pos, placeholder.size(), encoded);
  }

  std::string query;
  std::string form;
  Json body = Json::object();
  bool has_body_property = false;
  for (const auto& a : assignments) {
    switch (a.location) {
      case ParamLocation::Path:
        break;
      case ParamLocation::Query:
        query += query.empty() ? '?' : '&';
        query += percent_encode(a.name) + "=" + percent_encode(value_to_text(a.value));
        break;
      case ParamLocation::Header:
        plan.headers.emplace_back(header_safe(a.name), header_safe(value_to_text(a.value)));
        break;
      case ParamLocation::BodyProperty:
        body[a.name] = a.value;
        has_body_property = true;
        break;
      case ParamLocation::Form:
        if (!form.empty()) form += '&';
        form += percent_encode(a.name) + "=" + percent_encode(value_to_text(a.value));
        break;
    }
  }
  if (has_body_property) {
    plan.body = body.dump();
    plan.headers.emplace_back("Content-Type", "application/json");
  } else if (!form.empty()) {
    plan.body = std::move(form);
    plan.headers.emplace_back("Content-Type", "application/x-www-form-urlencoded");
  }

  plan.absolute_url = join_url(base_url, base_path, path) + query;
  plan.param_assignments = std::move(assignments);
  return plan;
}

std::optional<ParsedUrl> parse_url(std::string_view url) {
  ParsedUrl out;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return std::nullopt;
  out.scheme = std::string(url.substr(0, scheme_end));
  std::transform(out.scheme.begin(), out.scheme.end(), out.scheme.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (out.scheme != "http" && out.scheme != "https") return std::nullopt;

  std::string_view rest = url.substr(scheme_end + 3);
  const auto authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  out.path_and_query = authority_end == std::string_view::npos
                           ? std::string("/")
                           : std::string(rest.substr(authority_end));
  if (!out.path_and_query.empty() && out.path_and_query.front() != '/')
    out.path_and_query.insert(out.path_and_query.begin(), '/');
  if (auto hash = out.path_and_query.find('#'); hash != std::string::npos)
    out.path_and_query.resize(hash);

  if (authority.empty()) return std::nullopt;
  out.port = out.scheme == "https" ? 443 : 80;
  if (auto colon = authority.rfind(':');
      colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    const std::string port_text(authority.substr(colon + 1));
    if (port_text.empty() ||
        !std::all_of(port_text.begin(), port_text.end(), [](unsigned char c) { return std::isdigit(c); }))
      return std::nullopt;
    out.port = std::stoi(port_text);
    authority = authority.substr(0, colon);
  }
  out.host = std::string(authority);
  if (out.host.empty() || out.port <= 0 || out.port > 65535) return std::nullopt;
  return out;
}

struct HttpExecutor::Impl {
  ExecutorOptions options;
  std::map<std::string, std::unique_ptr<httplib::Client>> clients;

  httplib::Client& client_for(const ParsedUrl& url) {
    const std::string origin = url.scheme + "://" + url.host + ":" + std::to_string(url.port);
    auto& slot = clients[origin];
    if (!slot) {
      slot = std::make_unique<httplib::Client>(origin);
      const auto sec = options.timeout_ms / 1000;
      const auto usec = (options.timeout_ms % 1000) * 1000;
      slot->set_connection_timeout(sec, usec);
      slot->set_read_timeout(sec, usec);
      slot->set_write_timeout(sec, usec);
      slot->set_keep_alive(true);
      slot->set_url_encode(false);
      slot->set_follow_location(false);
      slot->enable_server_certificate_verification(false);
    }
    return *slot;
  }
};

HttpExecutor::HttpExecutor(ExecutorOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
}

HttpExecutor::~HttpExecutor() = default;

namespace {

std::string error_tag(httplib::Error error, bool timed_out) {
  switch (error) {
    case httplib::Error::Connection: return "connection-refused";
    case httplib::Error::ConnectionTimeout: return "timeout";
    case httplib::Error::Read: return timed_out ? "timeout" : "read-error";
    case httplib::Error::Write: return timed_out ? "timeout" : "write-error";
    case httplib::Error::SSLConnection:
    case httplib::Error::SSLLoadingCerts:
    case httplib::Error::SSLServerVerification: return "tls-error";
    default: return "transport-error";
  }
}

}  // namespace

ResponseRecord HttpExecutor::execute(const RequestPlan& plan) {
  ResponseRecord record;
  auto url = parse_url(plan.absolute_url);
  if (!url) {
    record.error = "invalid-url";
    return record;
  }

  httplib::Request req;
  req.method = std::string(to_string(plan.method));
  req.path = url->path_and_query;
  for (const auto& [name, value] : plan.headers) req.headers.emplace(name, value);
  if (plan.body) req.body = *plan.body;

  auto& client = impl_->client_for(*url);
  const auto start = std::chrono::steady_clock::now();
  httplib::Result result = client.send(req);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  record.latency_ms = std::chrono::duration<double, std::milli>(elapsed).count();

  if (!result) {
    const bool timed_out = record.latency_ms >= impl_->options.timeout_ms;
    record.error = error_tag(result.error(), timed_out);
    record.status_class = StatusClass::Other;
    // A dead keep-alive connection must not poison the next request.
    client.stop();
    return record;
  }
  record.status = result->status;
  record.status_class = classify_status(record.status);
  record.content_type = result->get_header_value("Content-Type");
  record.body = std::move(result->body);
  if (record.body.size() > impl_->options.body_cap) {
    record.body.resize(impl_->options.body_cap);
    record.body_truncated = true;
  }
  return record;
}

ResponseRecord execute(const RequestPlan& plan, int timeout_ms) {
  ExecutorOptions options;
  options.timeout_ms = timeout_ms;
  HttpExecutor executor(options);
  return executor.execute(plan);
}

}  // namespace arat
