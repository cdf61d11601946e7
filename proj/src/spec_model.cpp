#include "arat/spec_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace arat {

std::string_view to_string(HttpMethod method) {
  switch (method) {
    case HttpMethod::Get: return "GET";
    case HttpMethod::Post: return "POST";
    case HttpMethod::Put: return "PUT";
    case HttpMethod::Delete: return "DELETE";
    case HttpMethod::Patch: return "PATCH";
    case HttpMethod::Head: return "HEAD";
  }
  return "GET";
}

std::string_view to_string(ParamLocation location) {
  switch (location) {
    case ParamLocation::Path: return "path";
    case ParamLocation::Query: return "query";
    case ParamLocation::Header: return "header";
    case ParamLocation::BodyProperty: return "body";
    case ParamLocation::Form: return "form";
  }
  return "query";
}

std::string_view to_string(PrimitiveType type) {
  switch (type) {
    case PrimitiveType::String: return "string";
    case PrimitiveType::Number: return "number";
    case PrimitiveType::Integer: return "integer";
    case PrimitiveType::Boolean: return "boolean";
    case PrimitiveType::Array: return "array";
    case PrimitiveType::Object: return "object";
  }
  return "string";
}

const OperationSpec* ApiSpec::find(std::string_view operation_id) const {
  for (const auto& op : operations) {
    if (op.operation_id == operation_id) return &op;
  }
  return nullptr;
}

namespace {

// ---------------------------------------------------------------------------
// YAML -> JSON

bool is_yaml_null(const std::string& s) {
  return s.empty() || s == "~" || s == "null" || s == "Null" || s == "NULL";
}

Json plain_scalar_to_json(const std::string& s) {
  if (is_yaml_null(s)) return nullptr;
  if (s == "true" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "False" || s == "FALSE") return false;

  static const std::regex int_re(R"([-+]?[0-9]+)");
  static const std::regex float_re(R"([-+]?(\.[0-9]+|[0-9]+(\.[0-9]*)?)([eE][-+]?[0-9]+)?)");
  if (std::regex_match(s, int_re)) {
    std::int64_t v = 0;
    const char* begin = s.data() + (s.front() == '+' ? 1 : 0);
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
    return s;
  }
  if (std::regex_match(s, float_re)) {
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      return s;
    }
  }
  return s;
}

Json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Undefined:
    case YAML::NodeType::Null:
      return nullptr;
    case YAML::NodeType::Scalar:
      // Quoted scalars carry the "!" tag and are always strings.
      if (node.Tag() == "?") return plain_scalar_to_json(node.Scalar());
      return node.Scalar();
    case YAML::NodeType::Sequence: {
      Json out = Json::array();
      for (const auto& item : node) out.push_back(yaml_to_json(item));
      return out;
    }
    case YAML::NodeType::Map: {
      Json out = Json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return out;
    }
  }
  return nullptr;
}

Json parse_document(std::string_view document, FormatHint hint) {
  if (hint == FormatHint::Auto) {
    auto first = std::find_if(document.begin(), document.end(),
                              [](unsigned char c) { return !std::isspace(c); });
    hint = (first != document.end() && (*first == '{' || *first == '['))
               ? FormatHint::Json
               : FormatHint::Yaml;
  }
  if (hint == FormatHint::Json) {
    try {
      return Json::parse(document);
    } catch (const Json::parse_error& e) {
      throw MalformedDocument(std::string("invalid JSON: ") + e.what());
    }
  }
  try {
    return yaml_to_json(YAML::Load(std::string(document)));
  } catch (const YAML::Exception& e) {
    throw MalformedDocument(std::string("invalid YAML: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// $ref resolution (same document only)

constexpr int kMaxRefDepth = 32;

const Json* follow_pointer(const Json& root, std::string_view ref) {
  if (ref.empty() || ref.front() != '#') return nullptr;
  ref.remove_prefix(1);
  const Json* cur = &root;
  while (!ref.empty()) {
    if (ref.front() != '/') return nullptr;
    ref.remove_prefix(1);
    auto end = ref.find('/');
    std::string token(ref.substr(0, end));
    ref = end == std::string_view::npos ? std::string_view{} : ref.substr(end);
    for (std::size_t pos = 0; (pos = token.find('~', pos)) != std::string::npos; ++pos) {
      if (pos + 1 < token.size() && token[pos + 1] == '1') token.replace(pos, 2, "/");
      else if (pos + 1 < token.size() && token[pos + 1] == '0') token.replace(pos, 2, "~");
    }
    if (cur->is_object()) {
      auto it = cur->find(token);
      if (it == cur->end()) return nullptr;
      cur = &*it;
    } else if (cur->is_array()) {
      std::size_t idx = 0;
      auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
      if (ec != std::errc{} || idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
    } else {
      return nullptr;
    }
  }
  return cur;
}

const Json& empty_object() {
  static const Json empty = Json::object();
  return empty;
}

// Unresolvable (external) references resolve to an empty schema.
const Json& resolve(const Json& root, const Json& node) {
  const Json* cur = &node;
  for (int depth = 0; depth < kMaxRefDepth; ++depth) {
    if (!cur->is_object()) return *cur;
    auto it = cur->find("$ref");
    if (it == cur->end() || !it->is_string()) return *cur;
    const Json* target = follow_pointer(root, it->get_ref<const std::string&>());
    if (target == nullptr) return empty_object();
    cur = target;
  }
  throw MalformedDocument("$ref chain too deep or cyclic");
}

// ---------------------------------------------------------------------------
// Schema helpers

std::string string_or(const Json& node, const char* key, std::string fallback = {}) {
  if (!node.is_object()) return fallback;
  auto it = node.find(key);
  if (it != node.end() && it->is_string()) return it->get<std::string>();
  return fallback;
}

std::optional<double> number_at(const Json& node, const char* key) {
  auto it = node.find(key);
  if (it != node.end() && it->is_number()) return it->get<double>();
  return std::nullopt;
}

std::optional<std::size_t> size_at(const Json& node, const char* key) {
  auto it = node.find(key);
  if (it != node.end() && it->is_number() && it->get<double>() >= 0)
    return static_cast<std::size_t>(it->get<double>());
  return std::nullopt;
}

PrimitiveType type_of(const Json& schema) {
  if (!schema.is_object()) return PrimitiveType::String;
  auto it = schema.find("type");
  std::string name;
  if (it != schema.end()) {
    if (it->is_string()) {
      name = it->get<std::string>();
    } else if (it->is_array()) {
      for (const auto& t : *it) {
        if (t.is_string() && t.get<std::string>() != "null") {
          name = t.get<std::string>();
          break;
        }
      }
    }
  }
  if (name == "number") return PrimitiveType::Number;
  if (name == "integer") return PrimitiveType::Integer;
  if (name == "boolean") return PrimitiveType::Boolean;
  if (name == "array") return PrimitiveType::Array;
  if (name == "object") return PrimitiveType::Object;
  if (name.empty() && (schema.contains("properties") || schema.contains("allOf")))
    return PrimitiveType::Object;
  if (name.empty() && schema.contains("items")) return PrimitiveType::Array;
  return PrimitiveType::String;
}

ValueConstraints constraints_of(const Json& schema) {
  ValueConstraints c;
  if (!schema.is_object()) return c;
  if (auto it = schema.find("enum"); it != schema.end() && it->is_array() && !it->empty())
    c.enum_values = it->get<std::vector<Json>>();
  if (auto it = schema.find("pattern"); it != schema.end() && it->is_string())
    c.pattern = it->get<std::string>();
  c.minimum = number_at(schema, "minimum");
  c.maximum = number_at(schema, "maximum");
  c.min_length = size_at(schema, "minLength");
  c.max_length = size_at(schema, "maxLength");
  // Contradictory bounds are dropped rather than rejected.
  if (c.minimum && c.maximum && *c.minimum > *c.maximum) c.minimum = c.maximum = std::nullopt;
  if (c.min_length && c.max_length && *c.min_length > *c.max_length)
    c.min_length = c.max_length = std::nullopt;
  return c;
}

// Properties of an object schema, merging allOf members.
void collect_properties(const Json& root, const Json& schema_node, Json& properties,
                        std::vector<std::string>& required, int depth = 0) {
  if (depth > kMaxRefDepth) return;
  const Json& schema = resolve(root, schema_node);
  if (!schema.is_object()) return;
  if (auto it = schema.find("allOf"); it != schema.end() && it->is_array()) {
    for (const auto& part : *it) collect_properties(root, part, properties, required, depth + 1);
  }
  if (auto it = schema.find("properties"); it != schema.end() && it->is_object()) {
    for (const auto& [name, prop] : it->items()) properties[name] = prop;
  }
  if (auto it = schema.find("required"); it != schema.end() && it->is_array()) {
    for (const auto& r : *it)
      if (r.is_string()) required.push_back(r.get<std::string>());
  }
}

void add_unique(std::vector<Json>& out, Json value) {
  if (value.is_null()) return;
  if (std::find(out.begin(), out.end(), value) == out.end()) out.push_back(std::move(value));
}

ParameterSpec make_param(const Json& root, std::string name, ParamLocation location,
                         bool required, const Json& schema_node, const Json& example_node) {
  const Json& schema = resolve(root, schema_node);
  ParameterSpec p;
  p.name = std::move(name);
  p.location = location;
  p.required = required || location == ParamLocation::Path;
  p.type = type_of(schema);
  if (auto fmt = string_or(schema, "format"); !fmt.empty()) p.format = fmt;
  p.constraints = constraints_of(schema);
  p.example_candidates = extract_spec_examples(example_node);
  return p;
}

std::optional<HttpMethod> method_from_key(const std::string& key) {
  if (key == "get") return HttpMethod::Get;
  if (key == "post") return HttpMethod::Post;
  if (key == "put") return HttpMethod::Put;
  if (key == "delete") return HttpMethod::Delete;
  if (key == "patch") return HttpMethod::Patch;
  if (key == "head") return HttpMethod::Head;
  return std::nullopt;
}

std::string synthesize_operation_id(HttpMethod method, const std::string& path) {
  std::string id(to_string(method));
  std::transform(id.begin(), id.end(), id.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  id += '_';
  bool pending_sep = false;
  for (char c : path) {
    if (c == '{' || c == '}') continue;
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (pending_sep && id.back() != '_') id += '_';
      pending_sep = false;
      id += c;
    } else {
      pending_sep = true;
    }
  }
  if (id.back() == '_') id += "root";
  return id;
}

bool is_json_media(const std::string& media) {
  return media.find("json") != std::string::npos;
}

bool is_form_media(const std::string& media) {
  return media == "application/x-www-form-urlencoded" || media == "multipart/form-data";
}

// Schema of an OpenAPI 3 content map, preferring JSON media types.
std::optional<std::pair<std::string, Json>> pick_content(const Json& content) {
  if (!content.is_object() || content.empty()) return std::nullopt;
  for (const auto& [media, body] : content.items()) {
    if (is_json_media(media) && body.is_object())
      return std::make_pair(media, body.value("schema", Json::object()));
  }
  for (const auto& [media, body] : content.items()) {
    if (body.is_object()) return std::make_pair(media, body.value("schema", Json::object()));
  }
  return std::nullopt;
}

void flatten_body(const Json& root, const Json& schema, ParamLocation location,
                  std::vector<ParameterSpec>& out) {
  Json properties = Json::object();
  std::vector<std::string> required;
  collect_properties(root, schema, properties, required);
  for (const auto& [name, prop_node] : properties.items()) {
    const Json& prop = resolve(root, prop_node);
    const bool req = std::find(required.begin(), required.end(), name) != required.end();
    out.push_back(make_param(root, name, location, req, prop, prop));
  }
}

void collect_response_keys(const Json& root, const Json& schema_node, std::set<std::string>& keys) {
  const Json& schema = resolve(root, schema_node);
  if (!schema.is_object()) return;
  Json properties = Json::object();
  std::vector<std::string> unused;
  collect_properties(root, schema, properties, unused);
  for (const auto& [name, _] : properties.items()) keys.insert(name);
  if (auto it = schema.find("items"); it != schema.end()) {
    Json item_props = Json::object();
    collect_properties(root, *it, item_props, unused);
    for (const auto& [name, _] : item_props.items()) keys.insert(name);
  }
}

class SpecParser {
 public:
  explicit SpecParser(const Json& root) : root_(root) {}

  ApiSpec parse() {
    if (!root_.is_object()) throw UnsupportedVersion("document root is not an object");
    const std::string swagger = string_or(root_, "swagger");
    const std::string openapi = string_or(root_, "openapi");
    if (swagger.rfind("2", 0) == 0) {
      v3_ = false;
    } else if (openapi.rfind("3", 0) == 0) {
      v3_ = true;
    } else {
      throw UnsupportedVersion("no recognizable 'swagger: 2.x' or 'openapi: 3.x' root");
    }

    ApiSpec spec;
    spec.raw_title = string_or(root_.value("info", Json::object()), "title");
    spec.base_path = v3_ ? base_path_from_servers() : string_or(root_, "basePath");
    while (!spec.base_path.empty() && spec.base_path.back() == '/') spec.base_path.pop_back();

    const Json& paths = root_.contains("paths") ? root_["paths"] : empty_object();
    if (!paths.is_object()) throw MalformedDocument("'paths' is not an object");

    for (const auto& [path, item_node] : paths.items()) {
      const Json& item = resolve(root_, item_node);
      if (!item.is_object()) continue;
      const Json shared = item.value("parameters", Json::array());
      for (const auto& [key, op_node] : item.items()) {
        auto method = method_from_key(key);
        if (!method || !op_node.is_object()) continue;
        spec.operations.push_back(parse_operation(path, *method, op_node, shared));
      }
    }
    if (spec.operations.empty()) throw EmptySpec("specification declares no operations");
    make_ids_unique(spec);
    return spec;
  }

 private:
  std::string base_path_from_servers() const {
    auto servers = root_.value("servers", Json::array());
    if (!servers.is_array() || servers.empty()) return {};
    std::string url = string_or(servers[0], "url");
    if (auto scheme = url.find("://"); scheme != std::string::npos) {
      auto slash = url.find('/', scheme + 3);
      return slash == std::string::npos ? std::string{} : url.substr(slash);
    }
    return url.rfind("/", 0) == 0 ? url : std::string{};
  }

  OperationSpec parse_operation(const std::string& path, HttpMethod method, const Json& op,
                                const Json& shared_params) {
    OperationSpec out;
    out.method = method;
    out.path_template = path;
    out.operation_id = string_or(op, "operationId");
    if (out.operation_id.empty()) out.operation_id = synthesize_operation_id(method, path);

    // Operation-level parameters override path-level ones with the same (name, in).
    std::vector<Json> param_nodes;
    auto add_params = [&](const Json& list) {
      if (!list.is_array()) return;
      for (const auto& raw : list) {
        const Json& node = resolve(root_, raw);
        if (!node.is_object()) continue;
        auto same = std::find_if(param_nodes.begin(), param_nodes.end(), [&](const Json& existing) {
          return existing.value("name", "") == node.value("name", "") &&
                 existing.value("in", "") == node.value("in", "");
        });
        if (same != param_nodes.end()) *same = node;
        else param_nodes.push_back(node);
      }
    };
    add_params(shared_params);
    add_params(op.value("parameters", Json::array()));

    for (const auto& node : param_nodes) add_parameter(node, out.parameters);

    if (v3_) {
      if (auto it = op.find("requestBody"); it != op.end()) {
        const Json& body = resolve(root_, *it);
        if (auto picked = pick_content(body.value("content", Json::object()))) {
          auto location = is_form_media(picked->first) ? ParamLocation::Form
                                                        : ParamLocation::BodyProperty;
          flatten_body(root_, picked->second, location, out.parameters);
        }
      }
    }

    for (const auto& name : path_placeholders(path)) {
      auto declared = std::find_if(out.parameters.begin(), out.parameters.end(), [&](const auto& p) {
        return p.location == ParamLocation::Path && p.name == name;
      });
      if (declared == out.parameters.end()) {
        ParameterSpec p;
        p.name = name;
        p.location = ParamLocation::Path;
        p.required = true;
        out.parameters.push_back(std::move(p));
      }
    }

    if (auto it = op.find("responses"); it != op.end() && it->is_object()) {
      for (const auto& [code, resp_node] : it->items()) {
        const Json& resp = resolve(root_, resp_node);
        if (!resp.is_object()) continue;
        if (v3_) {
          if (auto picked = pick_content(resp.value("content", Json::object())))
            collect_response_keys(root_, picked->second, out.response_keys);
        } else if (auto schema = resp.find("schema"); schema != resp.end()) {
          collect_response_keys(root_, *schema, out.response_keys);
        }
      }
    }
    return out;
  }

  void add_parameter(const Json& node, std::vector<ParameterSpec>& out) {
    const std::string name = string_or(node, "name");
    const std::string in = string_or(node, "in");
    const bool required = node.value("required", false) == true;
    if (name.empty() && in != "body") return;

    if (in == "body") {
      flatten_body(root_, node.value("schema", Json::object()), ParamLocation::BodyProperty, out);
      return;
    }
    ParamLocation location;
    if (in == "path") location = ParamLocation::Path;
    else if (in == "query") location = ParamLocation::Query;
    else if (in == "header") location = ParamLocation::Header;
    else if (in == "formData") location = ParamLocation::Form;
    else return;  // cookie and unknown locations are not generated

    if (v3_ || node.contains("schema")) {
      // Examples may sit on the parameter and on its (possibly referenced) schema.
      Json view = node;
      const Json raw_schema = node.value("schema", Json::object());
      const Json schema = resolve(root_, raw_schema);
      view["schema"] = schema;
      out.push_back(make_param(root_, name, location, required, schema, view));
    } else {
      out.push_back(make_param(root_, name, location, required, node, node));
    }
  }

  static void make_ids_unique(ApiSpec& spec) {
    std::set<std::string> seen;
    for (auto& op : spec.operations) {
      std::string id = op.operation_id;
      for (int n = 2; !seen.insert(id).second; ++n) id = op.operation_id + "_" + std::to_string(n);
      op.operation_id = id;
    }
  }

  const Json& root_;
  bool v3_ = false;
};

}  // namespace

std::vector<std::string> path_placeholders(std::string_view path_template) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = path_template.find('{', pos)) != std::string_view::npos) {
    auto close = path_template.find('}', pos);
    if (close == std::string_view::npos) break;
    names.emplace_back(path_template.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return names;
}

std::vector<std::string> description_tokens(std::string_view description) {
  std::vector<std::string> tokens;
  auto is_quote = [](char c) { return c == '"' || c == '\''; };
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };

  // Words, with surrounding quote marks removed.
  std::size_t i = 0;
  while (i < description.size()) {
    while (i < description.size() && is_space(description[i])) ++i;
    std::size_t start = i;
    while (i < description.size() && !is_space(description[i])) ++i;
    std::string_view word = description.substr(start, i - start);
    while (!word.empty() && is_quote(word.front())) word.remove_prefix(1);
    while (!word.empty() && is_quote(word.back())) word.remove_suffix(1);
    if (!word.empty()) tokens.emplace_back(word);
  }

  // Quoted phrases. Double quotes pair up anywhere; a single quote only opens
  // at a word start and closes at a word end, so apostrophes are not phrases.
  for (std::size_t open = 0; open < description.size(); ++open) {
    const char q = description[open];
    if (!is_quote(q)) continue;
    if (q == '\'' && open > 0 && !is_space(description[open - 1])) continue;
    std::size_t close = open + 1;
    while (true) {
      close = description.find(q, close);
      if (close == std::string_view::npos) break;
      if (q == '"') break;
      const bool at_word_end = close + 1 == description.size() || is_space(description[close + 1]) ||
                               std::ispunct(static_cast<unsigned char>(description[close + 1]));
      if (at_word_end) break;
      ++close;
    }
    if (close == std::string_view::npos) continue;
    std::string_view phrase = description.substr(open + 1, close - open - 1);
    if (!phrase.empty()) tokens.emplace_back(phrase);
    open = close;
  }
  return tokens;
}

std::vector<Json> extract_spec_examples(const Json& param_node) {
  std::vector<Json> out;
  if (!param_node.is_object()) return out;

  const Json* schema = nullptr;
  if (auto it = param_node.find("schema"); it != param_node.end() && it->is_object()) schema = &*it;

  auto scalar = [](const Json& v) { return v.is_primitive() && !v.is_null(); };
  auto take_enum = [&](const Json& node) {
    if (auto it = node.find("enum"); it != node.end() && it->is_array())
      for (const auto& v : *it)
        if (scalar(v)) add_unique(out, v);
  };
  auto take_example = [&](const Json& node) {
    if (auto it = node.find("example"); it != node.end() && scalar(*it)) add_unique(out, *it);
  };
  auto take_description = [&](const Json& node) {
    if (auto it = node.find("description"); it != node.end() && it->is_string())
      for (auto& token : description_tokens(it->get_ref<const std::string&>()))
        add_unique(out, Json(std::move(token)));
  };

  take_enum(param_node);
  if (schema) take_enum(*schema);
  take_example(param_node);
  if (schema) take_example(*schema);
  take_description(param_node);
  if (schema) take_description(*schema);
  return out;
}

ApiSpec parse_spec(std::string_view document, FormatHint hint) {
  const Json root = parse_document(document, hint);
  return SpecParser(root).parse();
}

ApiSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read spec file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  FormatHint hint = FormatHint::Auto;
  const auto ext = path.extension().string();
  if (ext == ".json") hint = FormatHint::Json;
  else if (ext == ".yaml" || ext == ".yml") hint = FormatHint::Yaml;
  return parse_spec(buf.str(), hint);
}

}  // namespace arat
