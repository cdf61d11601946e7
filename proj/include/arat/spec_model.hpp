#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "arat/json.hpp"

namespace arat {

enum class HttpMethod { Get, Post, Put, Delete, Patch, Head };
enum class ParamLocation { Path, Query, Header, BodyProperty, Form };
enum class PrimitiveType { String, Number, Integer, Boolean, Array, Object };

std::string_view to_string(HttpMethod method);
std::string_view to_string(ParamLocation location);
std::string_view to_string(PrimitiveType type);

struct ValueConstraints {
  std::optional<std::vector<Json>> enum_values;
  std::optional<std::string> pattern;
  std::optional<double> minimum;
  std::optional<double> maximum;
  std::optional<std::size_t> min_length;
  std::optional<std::size_t> max_length;

  bool operator==(const ValueConstraints&) const = default;
};

struct ParameterSpec {
  std::string name;
  ParamLocation location = ParamLocation::Query;
  bool required = false;
  PrimitiveType type = PrimitiveType::String;
  std::optional<std::string> format;
  ValueConstraints constraints;
  /// Scalars mined from enum, example and description, first-seen order, no duplicates.
  std::vector<Json> example_candidates;

  bool operator==(const ParameterSpec&) const = default;
};

struct OperationSpec {
  std::string operation_id;
  HttpMethod method = HttpMethod::Get;
  std::string path_template;
  std::vector<ParameterSpec> parameters;
  std::set<std::string> response_keys;

  bool operator==(const OperationSpec&) const = default;
};

struct ApiSpec {
  std::string base_path;
  std::vector<OperationSpec> operations;
  std::string raw_title;

  const OperationSpec* find(std::string_view operation_id) const;

  bool operator==(const ApiSpec&) const = default;
};

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedDocument : public SpecError {
 public:
  using SpecError::SpecError;
};

class UnsupportedVersion : public SpecError {
 public:
  using SpecError::SpecError;
};

class EmptySpec : public SpecError {
 public:
  using SpecError::SpecError;
};

enum class FormatHint { Json, Yaml, Auto };

/// Parses an OpenAPI 2.0 or 3.x document (JSON or YAML) into one OperationSpec
/// per (path, method). Request-body object schemas are flattened one level into
/// body-property parameters; response schema property names become
/// response_keys. Same-document `$ref`s are resolved.
ApiSpec parse_spec(std::string_view document, FormatHint hint = FormatHint::Auto);

ApiSpec load_spec_file(const std::filesystem::path& path);

/// enum members, then `example`, then every word and quoted phrase of
/// `description`. Looks into an inline `schema` object as well (OpenAPI 3).
std::vector<Json> extract_spec_examples(const Json& param_node);

/// Words and quoted phrases of a free-text description, quote marks stripped.
std::vector<std::string> description_tokens(std::string_view description);

/// Names of the `{name}` placeholders of a path template, in order.
std::vector<std::string> path_placeholders(std::string_view path_template);

}  // namespace arat
