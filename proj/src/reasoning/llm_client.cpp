#include "crowdgen/llm_client.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "crowdgen/error.hpp"

namespace crowdgen {

HttpChatBackend::HttpChatBackend(LlmSettings settings) : settings_(std::move(settings)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(settings_.endpoint, m, url))
    fail(ErrorKind::kValidation, "LLM endpoint must be an http(s) URL: '" + settings_.endpoint + "'");
  origin_ = m[1];
  path_ = m[2].matched ? std::string(m[2]) : std::string("/v1/chat/completions");
}

std::string HttpChatBackend::complete(const std::vector<ChatMessage>& messages) {
  nlohmann::json body = {{"model", settings_.model}, {"temperature", settings_.temperature}};
  body["messages"] = nlohmann::json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  httplib::Client client(origin_);
  client.set_connection_timeout(settings_.timeout_seconds, 0);
  client.set_read_timeout(settings_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!settings_.api_key.empty()) headers.emplace("Authorization", "Bearer " + settings_.api_key);

  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res)
    fail(ErrorKind::kBackend,
         "LLM transport error (" + httplib::to_string(res.error()) + ") contacting " + origin_);
  if (res->status != 200)
    throw Error(ErrorKind::kBackend, "LLM endpoint returned HTTP " + std::to_string(res->status),
                {res->body});
  auto doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty() ||
      !doc["choices"][0].contains("message") ||
      !doc["choices"][0]["message"].value("content", nlohmann::json()).is_string())
    throw Error(ErrorKind::kBackend, "LLM endpoint returned an unexpected body", {res->body});
  return doc["choices"][0]["message"]["content"].get<std::string>();
}

Transcript::Transcript(const std::filesystem::path& path) : out_(path, std::ios::app) {
  if (!out_) fail(ErrorKind::kIo, "cannot open transcript file " + path.string());
}

void Transcript::record(const std::vector<ChatMessage>& request, const std::string& reply) {
  nlohmann::json line;
  line["request"] = nlohmann::json::array();
  for (const auto& m : request) line["request"].push_back({{"role", m.role}, {"content", m.content}});
  line["reply"] = reply;
  std::lock_guard lock(mu_);
  out_ << line.dump() << '\n';
  out_.flush();
}

std::string llm_key_from_env() {
  const char* v = std::getenv("CROWDGEN_LLM_KEY");
  return v ? std::string(v) : std::string();
}

}  // namespace crowdgen
