#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gamelab/errors.hpp"

namespace gamelab {

enum class ProviderKind { openai_style, anthropic_style, generic_http };

std::string to_string(ProviderKind kind);
ProviderKind provider_kind_from_string(const std::string& s);

// One model entry: endpoint, version string, sampling parameters, and the
// name of the environment variable holding the credential. An empty
// credentials_env means the endpoint needs no auth (mock server).
struct ModelProfile {
  std::string id;
  ProviderKind kind = ProviderKind::openai_style;
  std::string model_version;
  std::string endpoint;  // base URL, path suffix added per provider kind
  double temperature = 1.0;
  std::optional<double> top_p;
  std::optional<int> top_k;
  std::string credentials_env;
  int max_tokens = 512;
};

struct CompletionRequest {
  std::string prompt;
  std::optional<int> max_tokens;  // overrides the profile default when set
};

struct CompletionResult {
  std::string text;
  int attempts = 1;
  double latency_ms = 0.0;
  std::optional<long> total_tokens;
};

// Profiles file: JSON array of profile records. Throws ConfigError on
// malformed input.
std::vector<ModelProfile> parse_profiles(const std::string& text);
std::string serialize_profiles(const std::vector<ModelProfile>& profiles);

// Profiles shipped with the tool (the four models the harness targets by
// default, provider-recommended sampling).
std::vector<ModelProfile> default_profiles();

class ProfileRegistry {
 public:
  ProfileRegistry() = default;
  explicit ProfileRegistry(std::vector<ModelProfile> profiles);

  void add(ModelProfile profile);  // overwrites an existing id
  const ModelProfile* find(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::vector<ModelProfile> profiles_;
};

// Provider-kind-specific request body. Optional sampling fields that the
// profile leaves unset are absent from the body, not null.
nlohmann::json build_request(const ModelProfile& profile, const std::string& prompt,
                             std::optional<int> max_tokens = std::nullopt);

// Path appended to the profile endpoint for each provider kind.
std::string provider_path(ProviderKind kind);

struct GatewayOptions {
  int retry_budget = 5;          // transport retries after the first attempt
  double base_delay_s = 1.0;     // exponential backoff base
  double max_delay_s = 30.0;     // backoff cap (jitter applied after)
  double timeout_s = 60.0;       // per-request connect/read timeout
  int per_host_concurrency = 4;  // in-flight request cap per endpoint host
  std::optional<std::string> mock_endpoint;  // reroutes every profile
};

// Computes the backoff delay before jitter for the given retry (0-based).
// Exposed so the nondecreasing-delay property is testable.
double backoff_delay_s(const GatewayOptions& options, int retry_index);

// Chat-completion client shared across concurrent games. Safe for concurrent
// complete() calls; a per-host limiter is the only coordination point.
class Gateway {
 public:
  explicit Gateway(GatewayOptions options = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  const GatewayOptions& options() const { return options_; }

  // Sends the prompt, retrying transient failures (HTTP 429/5xx, transport
  // errors) with exponential backoff plus jitter. Throws GatewayError on
  // missing credentials (before any network call), exhausted retries, or a
  // malformed provider response.
  CompletionResult complete(const ModelProfile& profile, const CompletionRequest& request);

 private:
  class HostLimiter;

  GatewayOptions options_;
  std::unique_ptr<HostLimiter> limiter_;
};

}  // namespace gamelab
