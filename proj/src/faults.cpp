#include "arat/faults.hpp"

#include <array>
#include <regex>
#include <sstream>

#include <openssl/evp.h>

namespace arat {

std::string_view to_string(FingerprintKind kind) {
  return kind == FingerprintKind::StackTrace ? "stack-trace" : "normalized-text";
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

namespace {

struct Replacement {
  std::regex pattern;
  const char* placeholder;
};

const std::vector<Replacement>& volatile_tokens() {
  static const std::vector<Replacement> rules = [] {
    std::vector<Replacement> r;
    r.push_back({std::regex(R"([0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12})"),
                 "<UUID>"});
    r.push_back({std::regex(R"(\d{4}-\d{2}-\d{2}(?:[T ]\d{2}:\d{2}(?::\d{2}(?:[.,]\d+)?)?(?:Z|[+-]\d{2}:?\d{2})?)?)"),
                 "<TIMESTAMP>"});
    r.push_back({std::regex(R"(\b\d{10,}\b)"), "<EPOCH>"});
    r.push_back({std::regex(R"(\b[0-9a-fA-F]{8,}\b)"), "<HEX>"});
    return r;
  }();
  return rules;
}

// Frame and header syntax of JVM, Python and Go traces.
bool is_trace_line(const std::string& line) {
  static const std::regex jvm_frame(R"(^\s*at\s+[\w$.<>/\[\]]+\(.*\)\s*$)");
  static const std::regex caused_by(R"(^\s*Caused by:\s+\S+.*$)");
  static const std::regex python_header(R"(^\s*Traceback \(most recent call last\):\s*$)");
  static const std::regex python_frame(R"(^\s*File ".*", line \d+.*$)");
  static const std::regex go_header(R"(^\s*(panic: .*|goroutine \d+ \[.*\]:?)\s*$)");
  static const std::regex go_frame(R"(^\s*\S+\.go:\d+.*$)");
  static const std::regex exception_header(
      R"(^\s*(Exception in thread "[^"]*"\s+)?[A-Za-z_$][\w$]*(\.[A-Za-z_$][\w$]*)*(Exception|Error)(:.*)?\s*$)");
  return std::regex_match(line, jvm_frame) || std::regex_match(line, caused_by) ||
         std::regex_match(line, python_header) || std::regex_match(line, python_frame) ||
         std::regex_match(line, go_header) || std::regex_match(line, go_frame) ||
         std::regex_match(line, exception_header);
}

std::string trim(std::string s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

void collect_strings(const Json& node, std::vector<std::string>& out) {
  if (node.is_string()) {
    out.push_back(node.get<std::string>());
  } else if (node.is_structured()) {
    for (const auto& child : node) collect_strings(child, out);
  }
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out(text);
  for (const auto& rule : volatile_tokens()) out = std::regex_replace(out, rule.pattern, rule.placeholder);
  return out;
}

std::optional<std::string> extract_stack_trace(std::string_view body) {
  std::vector<std::string> texts;
  Json parsed = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (!parsed.is_discarded() && parsed.is_structured()) collect_strings(parsed, texts);
  else texts.emplace_back(body);

  std::string trace;
  for (const auto& text : texts) {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (!is_trace_line(line)) continue;
      if (!trace.empty()) trace += '\n';
      trace += trim(line);
    }
  }
  if (trace.empty()) return std::nullopt;
  return trace;
}

FaultFingerprint fingerprint(const ResponseRecord& response, std::uint64_t sequence) {
  FaultFingerprint fp;
  fp.first_seen = sequence;
  std::string canonical;
  if (response.body.empty()) {
    fp.kind = FingerprintKind::NormalizedText;
    canonical = "HTTP " + std::to_string(response.status);
  } else if (auto trace = extract_stack_trace(response.body)) {
    fp.kind = FingerprintKind::StackTrace;
    canonical = normalize_text(*trace);
  } else {
    fp.kind = FingerprintKind::NormalizedText;
    canonical = normalize_text(response.body);
  }
  fp.digest = sha256_hex(canonical);
  fp.exemplar = canonical.size() > kExemplarLimit ? canonical.substr(0, kExemplarLimit) : canonical;
  return fp;
}

bool FaultRegistry::add(const FaultFingerprint& fp, const RequestPlan& context) {
  ++total_;
  if (auto it = by_digest_.find(fp.digest); it != by_digest_.end()) {
    ++entries_[it->second].occurrences;
    return false;
  }
  by_digest_.emplace(fp.digest, entries_.size());
  entries_.push_back({fp, context, 1});
  return true;
}

}  // namespace arat
