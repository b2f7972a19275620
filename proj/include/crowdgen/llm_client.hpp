#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

namespace crowdgen {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

/// One chat-completion round trip. Implementations must be safe to call from
/// several threads at once.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

struct LlmSettings {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model = "gpt-4o";
  double temperature = 1.0;
  int max_retries = 3;
  int timeout_seconds = 120;
  std::string api_key;  // filled from CROWDGEN_LLM_KEY, never persisted
};

/// OpenAI-style chat-completions client over HTTP(S).
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(LlmSettings settings);
  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  LlmSettings settings_;
  std::string origin_;
  std::string path_;
};

/// Appends raw prompts and replies to a file, one JSON object per line.
class Transcript {
 public:
  explicit Transcript(const std::filesystem::path& path);
  void record(const std::vector<ChatMessage>& request, const std::string& reply);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

/// Reads CROWDGEN_LLM_KEY; empty when unset.
std::string llm_key_from_env();

}  // namespace crowdgen
