#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arat::testbed {

enum class FixtureKind {
  /// Products -> configurations -> features. Configuration ids are 128-bit
  /// server-issued tokens, so features can only be added by reusing them.
  Features,
  /// Every report lookup fails with 500 and one of three rotating stack traces
  /// stamped with the current time.
  Faults,
  /// Notes answered with plain text only; no response schemas.
  PlainText,
};

std::string_view to_string(FixtureKind kind);
FixtureKind fixture_from_string(std::string_view name);  // throws std::invalid_argument

class PortUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// OpenAPI document describing a fixture (JSON text).
std::string openapi_document(FixtureKind kind);

/// A running fixture. Serves on its own threads until destroyed or shut down.
class FixtureServer {
 public:
  /// port 0 picks a free port. Throws PortUnavailable.
  static std::unique_ptr<FixtureServer> start(FixtureKind kind, std::uint64_t seed = 0,
                                              std::string_view host = "127.0.0.1", int port = 0);
  ~FixtureServer();

  const std::string& base_url() const;
  FixtureKind kind() const;
  void shutdown();
  /// Blocks until shut down.
  void wait();

  struct Impl;

 private:
  explicit FixtureServer(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace arat::testbed
