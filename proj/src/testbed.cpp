#include "arat/testbed.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include <httplib.h>

#include "arat/json.hpp"

namespace arat::testbed {

std::string_view to_string(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::Features: return "features";
    case FixtureKind::Faults: return "faults";
    case FixtureKind::PlainText: return "plaintext";
  }
  return "features";
}

FixtureKind fixture_from_string(std::string_view name) {
  for (auto kind : {FixtureKind::Features, FixtureKind::Faults, FixtureKind::PlainText})
    if (name == to_string(kind)) return kind;
  throw std::invalid_argument("unknown fixture '" + std::string(name) +
                              "' (expected features, faults or plaintext)");
}

namespace {

Json string_schema() { return {{"type", "string"}}; }

Json path_param(const std::string& name, Json extra = Json::object()) {
  Json p = {{"name", name}, {"in", "path"}, {"required", true}, {"schema", string_schema()}};
  for (auto& [k, v] : extra.items()) p[k] = v;
  return p;
}

Json object_schema(std::initializer_list<std::pair<const char*, const char*>> props) {
  Json properties = Json::object();
  for (const auto& [name, type] : props) properties[name] = {{"type", type}};
  return {{"type", "object"}, {"properties", std::move(properties)}};
}

Json json_response(const char* description, Json schema) {
  return {{"description", description},
          {"content", {{"application/json", {{"schema", std::move(schema)}}}}}};
}

std::string features_document() {
  const Json product_name = path_param("productName", {{"example", "product-1"}});
  const Json configuration_id = path_param("configurationId");
  const Json not_found = {{"description", "Not found"}};

  Json paths = Json::object();
  paths["/products/{productName}"] = {
      {"post",
       {{"operationId", "createProduct"},
        {"parameters", {product_name}},
        {"responses",
         {{"201", json_response("Product created", object_schema({{"productName", "string"}})),}}}}},
      {"get",
       {{"operationId", "getProduct"},
        {"parameters", {product_name}},
        {"responses",
         {{"200", json_response("The product", object_schema({{"productName", "string"},
                                                              {"configurationCount", "integer"}}))},
          {"404", not_found}}}}}};
  paths["/products/{productName}/configurations"] = {
      {"post",
       {{"operationId", "createConfiguration"},
        {"parameters", {product_name}},
        {"requestBody",
         {{"required", false},
          {"content",
           {{"application/json", {{"schema", object_schema({{"configurationName", "string"}})}}}}}}},
        {"responses",
         {{"201", json_response("Configuration created",
                                object_schema({{"configurationId", "string"},
                                               {"configurationName", "string"},
                                               {"productName", "string"}}))},
          {"404", not_found}}}}}};
  paths["/products/{productName}/configurations/{configurationId}/features/{featureName}"] = {
      {"post",
       {{"operationId", "addFeatureToConfiguration"},
        {"parameters", {product_name, configuration_id, path_param("featureName")}},
        {"responses", {{"201", {{"description", "Feature added"}}}, {"404", not_found}}}}}};
  const Json paging = {{"type", "integer"}, {"minimum", 0}, {"maximum", 100}};
  paths["/products/{productName}/configurations/{configurationId}/features"] = {
      {"get",
       {{"operationId", "getConfigurationActivedFeatures"},
        {"parameters",
         {product_name, configuration_id,
          {{"name", "limit"}, {"in", "query"}, {"schema", paging}},
          {{"name", "offset"}, {"in", "query"}, {"schema", paging}}}},
        {"responses",
         {{"200", json_response("Active feature names",
                                {{"type", "array"}, {"items", string_schema()}})},
          {"404", not_found}}}}}};
  paths["/health"] = {
      {"get", {{"operationId", "health"}, {"responses", {{"200", {{"description", "Up"}}}}}}}};

  Json doc = {{"openapi", "3.0.3"},
              {"info", {{"title", "Features Service"}, {"version", "1.0.0"}}},
              {"servers", {{{"url", "/"}}}},
              {"paths", std::move(paths)}};
  return doc.dump(2);
}

std::string faults_document() {
  Json paths = Json::object();
  paths["/reports/{reportId}"] = {
      {"get",
       {{"operationId", "getReport"},
        {"produces", {"application/json"}},
        {"parameters",
         {{{"name", "reportId"}, {"in", "path"}, {"required", true}, {"type", "string"},
           {"example", "weekly"}}}},
        {"responses",
         {{"200",
           {{"description", "The report"},
            {"schema", object_schema({{"reportId", "string"}, {"rows", "integer"}})}}}}}}}};
  paths["/health"] = {
      {"get", {{"operationId", "health"}, {"responses", {{"200", {{"description", "Up"}}}}}}}};
  Json doc = {{"swagger", "2.0"},
              {"info", {{"title", "Fault Emitter"}, {"version", "1.0.0"}}},
              {"basePath", "/"},
              {"paths", std::move(paths)}};
  return doc.dump(2);
}

std::string plaintext_document() {
  const Json title = path_param("noteTitle", {{"example", "groceries"}});
  Json paths = Json::object();
  paths["/notes/{noteTitle}"] = {
      {"post",
       {{"operationId", "createNote"},
        {"parameters", {title}},
        {"responses", {{"201", {{"description", "Created (plain text)"}}}}}}},
      {"get",
       {{"operationId", "getNote"},
        {"parameters", {title}},
        {"responses", {{"200", {{"description", "Note text"}}}, {"404", {{"description", "Not found"}}}}}}},
      {"delete",
       {{"operationId", "deleteNote"},
        {"parameters", {title}},
        {"responses", {{"204", {{"description", "Deleted"}}}, {"404", {{"description", "Not found"}}}}}}}};
  Json doc = {{"openapi", "3.0.3"},
              {"info", {{"title", "Plain Notes"}, {"version", "1.0.0"}}},
              {"paths", std::move(paths)}};
  return doc.dump(2);
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

// Each script stamps the current time into its message.
std::string fault_script(std::uint64_t which, const std::string& now) {
  switch (which % 3) {
    case 0:
      return "java.lang.IllegalStateException: report cache expired at " + now + "\n"
             "\tat com.example.reports.ReportCache.lookup(ReportCache.java:88)\n"
             "\tat com.example.reports.ReportService.find(ReportService.java:41)\n"
             "\tat com.example.reports.ReportController.get(ReportController.java:27)";
    case 1:
      return "Traceback (most recent call last):\n"
             "  File \"/srv/reports/views.py\", line 52, in get_report\n"
             "    rows = render(load(report_id))\n"
             "  File \"/srv/reports/render.py\", line 17, in render\n"
             "    return [row[\"total\"] for row in data]\n"
             "KeyError: 'total' (request at " + now + ")";
    default:
      return "panic: runtime error: index out of range [3] with length 3 (" + now + ")\n\n"
             "goroutine 7 [running]:\n"
             "main.summarize(...)\n"
             "\t/app/reports/summary.go:33 +0x1d\n"
             "main.handleReport(0xc000010000)\n"
             "\t/app/reports/handler.go:58 +0x8f";
  }
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void not_found(httplib::Response& res, const std::string& what) {
  send_json(res, 404, {{"error", what + " not found"}});
}

bool parse_paging(const httplib::Request& req, const char* name, std::size_t& out) {
  if (!req.has_param(name)) return true;
  const std::string text = req.get_param_value(name);
  if (text.empty() || text.size() > 6) return false;
  for (char c : text)
    if (c < '0' || c > '9') return false;
  out = std::stoul(text);
  return out <= 100;
}

}  // namespace

std::string openapi_document(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::Features: return features_document();
    case FixtureKind::Faults: return faults_document();
    case FixtureKind::PlainText: return plaintext_document();
  }
  return features_document();
}

struct FixtureServer::Impl {
  FixtureKind kind = FixtureKind::Features;
  std::string base_url;
  httplib::Server server;
  std::thread thread;

  std::mutex mutex;
  std::mt19937_64 ids;
  struct Configuration {
    std::string name;
    std::vector<std::string> features;
  };
  // Configuration ids are globally unique, so they are looked up globally.
  std::map<std::string, Configuration> configurations;
  std::map<std::string, std::size_t> products;  // name -> configuration count
  std::map<std::string, std::string> notes;
  std::uint64_t fault_hits = 0;

  std::string next_id() {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(ids()),
                  static_cast<unsigned long long>(ids()));
    return buf;
  }

  void install_common() {
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "up"}});
    });
  }

  void install_features() {
    server.Post(R"(/products/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      const std::string name = req.matches[1];
      products.emplace(name, 0);
      send_json(res, 201, {{"productName", name}});
    });
    server.Get(R"(/products/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      const std::string name = req.matches[1];
      auto it = products.find(name);
      if (it == products.end()) return not_found(res, "product");
      send_json(res, 200, {{"productName", name}, {"configurationCount", it->second}});
    });
    server.Post(R"(/products/([^/]+)/configurations)",
                [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      const std::string product = req.matches[1];
      auto it = products.find(product);
      if (it == products.end()) return not_found(res, "product");
      std::string name = "default";
      if (!req.body.empty()) {
        Json body = Json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object())
          return send_json(res, 400, {{"error", "body must be a JSON object"}});
        if (body.contains("configurationName")) {
          if (!body["configurationName"].is_string())
            return send_json(res, 400, {{"error", "configurationName must be a string"}});
          name = body["configurationName"].get<std::string>();
        }
      }
      const std::string id = next_id();
      configurations[id] = Configuration{name, {}};
      ++it->second;
      send_json(res, 201, {{"configurationId", id}, {"configurationName", name}, {"productName", product}});
    });
    server.Post(R"(/products/([^/]+)/configurations/([^/]+)/features/([^/]+))",
                [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      if (!products.count(req.matches[1])) return not_found(res, "product");
      auto config = configurations.find(req.matches[2]);
      if (config == configurations.end()) return not_found(res, "configuration");
      config->second.features.push_back(req.matches[3]);
      res.status = 201;
      res.set_content("Successfully created", "text/plain");
    });
    server.Get(R"(/products/([^/]+)/configurations/([^/]+)/features)",
               [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      if (!products.count(req.matches[1])) return not_found(res, "product");
      auto config = configurations.find(req.matches[2]);
      if (config == configurations.end()) return not_found(res, "configuration");
      std::size_t limit = 100;
      std::size_t offset = 0;
      if (!parse_paging(req, "limit", limit) || !parse_paging(req, "offset", offset))
        return send_json(res, 400, {{"error", "limit and offset must be integers in [0, 100]"}});
      Json names = Json::array();
      const auto& features = config->second.features;
      for (std::size_t i = offset; i < features.size() && names.size() < limit; ++i)
        names.push_back(features[i]);
      send_json(res, 200, names);
    });
  }

  void install_faults() {
    server.Get(R"(/reports/([^/]+))", [this](const httplib::Request&, httplib::Response& res) {
      std::uint64_t hit;
      {
        std::lock_guard lock(mutex);
        hit = fault_hits++;
      }
      const std::string now = iso_now();
      send_json(res, 500,
                {{"timestamp", now},
                 {"status", 500},
                 {"error", "Internal Server Error"},
                 {"trace", fault_script(hit, now)}});
    });
  }

  void install_plaintext() {
    server.Post(R"(/notes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      notes[req.matches[1]] = req.body;
      res.status = 201;
      res.set_content("Successfully created", "text/plain");
    });
    server.Get(R"(/notes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      auto it = notes.find(req.matches[1]);
      if (it == notes.end()) {
        res.status = 404;
        res.set_content("No such note", "text/plain");
        return;
      }
      res.status = 200;
      res.set_content("Note " + it->first + ": " + it->second, "text/plain");
    });
    server.Delete(R"(/notes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      if (notes.erase(req.matches[1]) == 0) {
        res.status = 404;
        res.set_content("No such note", "text/plain");
        return;
      }
      res.status = 204;
    });
  }
};

FixtureServer::FixtureServer(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

std::unique_ptr<FixtureServer> FixtureServer::start(FixtureKind kind, std::uint64_t seed,
                                                    std::string_view host, int port) {
  auto impl = std::make_unique<Impl>();
  impl->kind = kind;
  impl->ids.seed(seed);
  impl->server.set_keep_alive_max_count(100000);
  // The library default adds SO_REUSEPORT, which would let two fixtures share a port.
  impl->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  impl->install_common();
  switch (kind) {
    case FixtureKind::Features: impl->install_features(); break;
    case FixtureKind::Faults: impl->install_faults(); break;
    case FixtureKind::PlainText: impl->install_plaintext(); break;
  }

  const std::string host_text(host);
  int bound = port;
  if (port == 0) {
    bound = impl->server.bind_to_any_port(host_text);
    if (bound < 0) throw PortUnavailable("no free port on " + host_text);
  } else if (!impl->server.bind_to_port(host_text, port)) {
    throw PortUnavailable("cannot bind " + host_text + ":" + std::to_string(port));
  }
  impl->base_url = "http://" + host_text + ":" + std::to_string(bound);
  impl->thread = std::thread([server = &impl->server] { server->listen_after_bind(); });
  impl->server.wait_until_ready();
  return std::unique_ptr<FixtureServer>(new FixtureServer(std::move(impl)));
}

FixtureServer::~FixtureServer() {
  shutdown();
  if (impl_->thread.joinable()) impl_->thread.join();
}

const std::string& FixtureServer::base_url() const { return impl_->base_url; }
FixtureKind FixtureServer::kind() const { return impl_->kind; }

void FixtureServer::shutdown() { impl_->server.stop(); }

void FixtureServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace arat::testbed
