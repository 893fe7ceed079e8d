#include "gamelab/gateway.hpp"

#ifdef GAMELAB_USE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gamelab {

namespace {

using nlohmann::json;

json must_object(const std::string& text) {
  json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw GatewayError(GatewayError::Kind::malformed_provider_response,
                       "provider response is not valid JSON");
  }
  return parsed;
}

std::string extract_text(ProviderKind kind, const std::string& body) {
  json parsed = must_object(body);
  try {
    switch (kind) {
      case ProviderKind::openai_style:
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
      case ProviderKind::anthropic_style:
        return parsed.at("content").at(0).at("text").get<std::string>();
      case ProviderKind::generic_http:
        return parsed.at("text").get<std::string>();
    }
  } catch (const json::exception&) {
    throw GatewayError(GatewayError::Kind::malformed_provider_response,
                       "provider response is missing the completion text field");
  }
  throw GatewayError(GatewayError::Kind::malformed_provider_response, "unknown provider kind");
}

std::optional<long> extract_total_tokens(const std::string& body) {
  json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  if (parsed.contains("usage") && parsed["usage"].is_object()) {
    const json& usage = parsed["usage"];
    if (usage.contains("total_tokens") && usage["total_tokens"].is_number_integer()) {
      return usage["total_tokens"].get<long>();
    }
    // Anthropic-shaped usage blocks report input/output separately.
    if (usage.contains("input_tokens") && usage.contains("output_tokens") &&
        usage["input_tokens"].is_number_integer() && usage["output_tokens"].is_number_integer()) {
      return usage["input_tokens"].get<long>() + usage["output_tokens"].get<long>();
    }
  }
  return std::nullopt;
}

struct SplitUrl {
  std::string scheme_host;  // e.g. "http://127.0.0.1:8080"
  std::string host_key;     // limiter key, scheme + host + port
  std::string base_path;    // path prefix before the provider path
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint must include a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host = url;
    out.base_path = "";
  } else {
    out.scheme_host = url.substr(0, path_start);
    out.base_path = url.substr(path_start);
    while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();
  }
  out.host_key = out.scheme_host;
  return out;
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

}  // namespace

std::string to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::openai_style: return "openai_style";
    case ProviderKind::anthropic_style: return "anthropic_style";
    case ProviderKind::generic_http: return "generic_http";
  }
  return "openai_style";
}

ProviderKind provider_kind_from_string(const std::string& s) {
  if (s == "openai_style") return ProviderKind::openai_style;
  if (s == "anthropic_style") return ProviderKind::anthropic_style;
  if (s == "generic_http") return ProviderKind::generic_http;
  throw ConfigError(ConfigError::Kind::type_mismatch, "kind",
                    "unknown provider kind \"" + s + "\"");
}

std::vector<ModelProfile> parse_profiles(const std::string& text) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    throw ConfigError(ConfigError::Kind::syntax, "", "profiles file is not valid JSON");
  }
  if (!parsed.is_array()) {
    throw ConfigError(ConfigError::Kind::type_mismatch, "", "profiles file must be a JSON array");
  }
  std::vector<ModelProfile> out;
  for (size_t i = 0; i < parsed.size(); ++i) {
    const json& item = parsed[i];
    std::string path = "[" + std::to_string(i) + "]";
    if (!item.is_object()) {
      throw ConfigError(ConfigError::Kind::type_mismatch, path, "profile must be an object");
    }
    ModelProfile p;
    for (const char* field : {"id", "kind", "modelVersion", "endpoint"}) {
      if (!item.contains(field)) {
        throw ConfigError(ConfigError::Kind::missing_field, path + "." + field,
                          std::string("missing required field \"") + field + "\"");
      }
      if (!item[field].is_string()) {
        throw ConfigError(ConfigError::Kind::type_mismatch, path + "." + field,
                          std::string("field \"") + field + "\" must be a string");
      }
    }
    p.id = item["id"].get<std::string>();
    p.kind = provider_kind_from_string(item["kind"].get<std::string>());
    p.model_version = item["modelVersion"].get<std::string>();
    p.endpoint = item["endpoint"].get<std::string>();
    if (item.contains("temperature")) {
      if (!item["temperature"].is_number()) {
        throw ConfigError(ConfigError::Kind::type_mismatch, path + ".temperature",
                          "temperature must be a number");
      }
      p.temperature = item["temperature"].get<double>();
    }
    if (item.contains("topP")) {
      if (!item["topP"].is_number()) {
        throw ConfigError(ConfigError::Kind::type_mismatch, path + ".topP",
                          "topP must be a number");
      }
      p.top_p = item["topP"].get<double>();
    }
    if (item.contains("topK")) {
      if (!item["topK"].is_number_integer()) {
        throw ConfigError(ConfigError::Kind::type_mismatch, path + ".topK",
                          "topK must be an integer");
      }
      p.top_k = item["topK"].get<int>();
    }
    if (item.contains("credentialsEnv")) {
      if (!item["credentialsEnv"].is_string()) {
        throw ConfigError(ConfigError::Kind::type_mismatch, path + ".credentialsEnv",
                          "credentialsEnv must be a string");
      }
      p.credentials_env = item["credentialsEnv"].get<std::string>();
    }
    if (item.contains("maxTokens")) {
      if (!item["maxTokens"].is_number_integer()) {
        throw ConfigError(ConfigError::Kind::type_mismatch, path + ".maxTokens",
                          "maxTokens must be an integer");
      }
      p.max_tokens = item["maxTokens"].get<int>();
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string serialize_profiles(const std::vector<ModelProfile>& profiles) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ModelProfile& p : profiles) {
    nlohmann::ordered_json item;
    item["id"] = p.id;
    item["kind"] = to_string(p.kind);
    item["modelVersion"] = p.model_version;
    item["endpoint"] = p.endpoint;
    item["temperature"] = p.temperature;
    if (p.top_p) item["topP"] = *p.top_p;
    if (p.top_k) item["topK"] = *p.top_k;
    item["credentialsEnv"] = p.credentials_env;
    item["maxTokens"] = p.max_tokens;
    arr.push_back(std::move(item));
  }
  return arr.dump(2) + "\n";
}

std::vector<ModelProfile> default_profiles() {
  std::vector<ModelProfile> out;
  {
    ModelProfile p;
    p.id = "llama-3.1-405b";
    p.kind = ProviderKind::generic_http;
    p.model_version = "meta/meta-llama-3.1-405b-instruct";
    p.endpoint = "https://api.replicate.com/v1";
    p.temperature = 0.9;
    p.top_p = 0.6;
    p.top_k = 40;
    p.credentials_env = "REPLICATE_API_TOKEN";
    out.push_back(std::move(p));
  }
  {
    ModelProfile p;
    p.id = "mistral-large";
    p.kind = ProviderKind::openai_style;
    p.model_version = "mistral-large-latest";
    p.endpoint = "https://api.mistral.ai/v1";
    p.temperature = 0.3;
    p.top_p = 1.0;
    p.credentials_env = "MISTRAL_API_KEY";
    out.push_back(std::move(p));
  }
  {
    ModelProfile p;
    p.id = "gpt-4";
    p.kind = ProviderKind::openai_style;
    p.model_version = "gpt-4";
    p.endpoint = "https://api.openai.com/v1";
    p.temperature = 1.0;
    p.top_p = 1.0;
    p.credentials_env = "OPENAI_API_KEY";
    out.push_back(std::move(p));
  }
  {
    ModelProfile p;
    p.id = "claude-3.5-sonnet";
    p.kind = ProviderKind::anthropic_style;
    p.model_version = "claude-3-5-sonnet-20241022";
    p.endpoint = "https://api.anthropic.com/v1";
    p.temperature = 1.0;
    p.credentials_env = "ANTHROPIC_API_KEY";
    out.push_back(std::move(p));
  }
  return out;
}

ProfileRegistry::ProfileRegistry(std::vector<ModelProfile> profiles)
    : profiles_(std::move(profiles)) {}

void ProfileRegistry::add(ModelProfile profile) {
  for (ModelProfile& existing : profiles_) {
    if (existing.id == profile.id) {
      existing = std::move(profile);
      return;
    }
  }
  profiles_.push_back(std::move(profile));
}

const ModelProfile* ProfileRegistry::find(const std::string& id) const {
  for (const ModelProfile& p : profiles_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::vector<std::string> ProfileRegistry::ids() const {
  std::vector<std::string> out;
  out.reserve(profiles_.size());
  for (const ModelProfile& p : profiles_) out.push_back(p.id);
  return out;
}

nlohmann::json build_request(const ModelProfile& profile, const std::string& prompt,
                             std::optional<int> max_tokens) {
  json body;
  int budget = max_tokens.value_or(profile.max_tokens);
  switch (profile.kind) {
    case ProviderKind::openai_style: {
      body["model"] = profile.model_version;
      body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
      body["temperature"] = profile.temperature;
      if (profile.top_p) body["top_p"] = *profile.top_p;
      body["max_tokens"] = budget;
      break;
    }
    case ProviderKind::anthropic_style: {
      body["model"] = profile.model_version;
      body["max_tokens"] = budget;
      body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
      body["temperature"] = profile.temperature;
      if (profile.top_p) body["top_p"] = *profile.top_p;
      if (profile.top_k) body["top_k"] = *profile.top_k;
      break;
    }
    case ProviderKind::generic_http: {
      body["model"] = profile.model_version;
      body["prompt"] = prompt;
      json params;
      params["temperature"] = profile.temperature;
      if (profile.top_p) params["top_p"] = *profile.top_p;
      if (profile.top_k) params["top_k"] = *profile.top_k;
      params["max_tokens"] = budget;
      body["params"] = std::move(params);
      break;
    }
  }
  return body;
}

std::string provider_path(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::openai_style: return "/chat/completions";
    case ProviderKind::anthropic_style: return "/messages";
    case ProviderKind::generic_http: return "/generate";
  }
  return "/chat/completions";
}

double backoff_delay_s(const GatewayOptions& options, int retry_index) {
  double delay = options.base_delay_s;
  for (int i = 0; i < retry_index; ++i) {
    delay *= 2.0;
    if (delay >= options.max_delay_s) break;
  }
  return std::min(delay, options.max_delay_s);
}

// Caps in-flight requests per endpoint host so a big campaign does not open
// hundreds of sockets against one provider.
class Gateway::HostLimiter {
 public:
  explicit HostLimiter(int per_host) : per_host_(per_host) {}

  void acquire(const std::string& host) {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return in_flight_[host] < per_host_; });
    ++in_flight_[host];
  }

  void release(const std::string& host) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      --in_flight_[host];
    }
    cv_.notify_all();
  }

 private:
  int per_host_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, int> in_flight_;
};

Gateway::Gateway(GatewayOptions options)
    : options_(std::move(options)),
      limiter_(std::make_unique<HostLimiter>(std::max(1, options_.per_host_concurrency))) {}

Gateway::~Gateway() = default;

CompletionResult Gateway::complete(const ModelProfile& profile,
                                   const CompletionRequest& request) {
  std::string credential;
  if (!profile.credentials_env.empty()) {
    const char* value = std::getenv(profile.credentials_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw GatewayError(GatewayError::Kind::auth_error,
                         "credential environment variable " + profile.credentials_env +
                             " is not set");
    }
    credential = value;
  }

  std::string endpoint = options_.mock_endpoint.value_or(profile.endpoint);
  SplitUrl url = split_url(endpoint);
  std::string path = url.base_path + provider_path(profile.kind);

  json body = build_request(profile, request.prompt, request.max_tokens);
  std::string payload = body.dump();

  httplib::Headers headers;
  headers.emplace("Content-Type", "application/json");
  if (!credential.empty()) {
    if (profile.kind == ProviderKind::anthropic_style) {
      headers.emplace("x-api-key", credential);
    } else {
      headers.emplace("Authorization", "Bearer " + credential);
    }
  }
  if (profile.kind == ProviderKind::anthropic_style) {
    headers.emplace("anthropic-version", "2023-06-01");
  }

  limiter_->acquire(url.host_key);
  struct Releaser {
    HostLimiter* limiter;
    const std::string& host;
    ~Releaser() { limiter->release(host); }
  } releaser{limiter_.get(), url.host_key};

  std::mt19937_64 jitter_rng(std::random_device{}());
  std::uniform_real_distribution<double> jitter(0.0, 0.25);

  auto started = std::chrono::steady_clock::now();
  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt <= options_.retry_budget; ++attempt) {
    if (attempt > 0) {
      double delay = backoff_delay_s(options_, attempt - 1);
      delay += delay * jitter(jitter_rng);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }

    httplib::Client client(url.scheme_host);
    client.set_connection_timeout(std::chrono::duration<double>(options_.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(options_.timeout_s));
    client.set_write_timeout(std::chrono::duration<double>(options_.timeout_s));

    httplib::Result res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw GatewayError(GatewayError::Kind::auth_error,
                         "endpoint rejected the credential (HTTP " +
                             std::to_string(res->status) + ")");
    }
    if (retryable_status(res->status)) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw GatewayError(GatewayError::Kind::malformed_provider_response,
                         "unexpected HTTP status " + std::to_string(res->status));
    }

    CompletionResult out;
    out.text = extract_text(profile.kind, res->body);
    out.attempts = attempt + 1;
    out.total_tokens = extract_total_tokens(res->body);
    auto finished = std::chrono::steady_clock::now();
    out.latency_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(finished - started)
            .count();
    return out;
  }

  throw GatewayError(GatewayError::Kind::exhausted_retries,
                     "retry budget exhausted after " +
                         std::to_string(options_.retry_budget + 1) + " attempts; last failure: " +
                         last_failure);
}

}  // namespace gamelab
