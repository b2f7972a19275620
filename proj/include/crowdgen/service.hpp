#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdgen/aggregator.hpp"
#include "crowdgen/error.hpp"
#include "crowdgen/image_ops.hpp"
#include "crowdgen/preference_library.hpp"
#include "crowdgen/study.hpp"
#include "crowdgen/widget_generator.hpp"

namespace crowdgen {

struct EngineConfig {
  std::filesystem::path library_path = "data/library/fixture.json";
  std::filesystem::path tasks_path = "data/tasks/evaluation.json";  // optional named tasks
  LibraryMode default_mode = LibraryMode::withlib(30);
  int k = 10;
  Backend backend = Backend::kOracle;
  LlmSettings llm;
  std::uint64_t seed = 0;
  std::uint64_t library_seed = 0;
  std::filesystem::path data_dir = "var";
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::optional<std::filesystem::path> transcript_path;
};

/// Reads "key = value" lines ('#' starts a comment). Relative paths resolve
/// against `base_dir`. Credentials are rejected here; see apply_env_overrides.
EngineConfig parse_engine_config(std::istream& in, const std::filesystem::path& base_dir = {});

/// CROWDGEN_DATA_DIR replaces data_dir; CROWDGEN_LLM_KEY fills llm.api_key.
void apply_env_overrides(EngineConfig& config);

/// Defaults, then the file (if any), then the environment.
EngineConfig load_engine_config(const std::optional<std::filesystem::path>& file);

/// Throws Error(kValidation) for k < 1 and Error(kIo) for a missing library.
void validate_config(const EngineConfig& config);

/// Config as JSON with the API key left out.
nlohmann::json to_json(const EngineConfig& config);

/// {"tasks": [TaskContext...]} keyed by name; empty when the file is absent.
std::map<std::string, TaskContext> load_named_tasks(const std::filesystem::path& file);

/// Context for a named task: the task file first, then the library.
std::optional<TaskContext> resolve_named_task(const std::string& name,
                                              const std::map<std::string, TaskContext>& named,
                                              const PreferenceLibrary& lib);

/// Response body shared by POST /v1/reason and the CLI.
nlohmann::json reason_response_json(const TaskContext& ctx, const ReasonerConfig& config, int k,
                                    const std::map<Aspect, AggregatedRecommendation>& recs);

std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// PNG files named by the SHA-256 of their bytes.
class ImageStore {
 public:
  explicit ImageStore(std::filesystem::path dir);

  /// Stores the encoded image and returns its handle. Idempotent.
  std::string put(const ImageBuffer& img);
  std::string put_png(std::span<const std::uint8_t> png);
  /// Throws Error(kNotFound) for unknown or malformed handles.
  ImageBuffer get(const std::string& handle) const;
  std::vector<std::uint8_t> get_png(const std::string& handle) const;
  bool contains(const std::string& handle) const;

 private:
  std::filesystem::path path_for(const std::string& handle) const;
  std::filesystem::path dir_;
};

/// Library snapshot shared by readers; appends copy, validate, persist and
/// swap under a single writer lock.
class LibraryStore {
 public:
  /// Loads `persisted` when it exists, `source` otherwise.
  LibraryStore(const std::filesystem::path& source, std::filesystem::path persisted);

  std::shared_ptr<const PreferenceLibrary> snapshot() const;
  void append(const std::string& task, Aspect aspect, PreferenceResponse response);

 private:
  std::filesystem::path persisted_;
  mutable std::mutex read_mu_;
  std::mutex write_mu_;
  std::shared_ptr<const PreferenceLibrary> current_;
};

/// Append-only JSON-lines file of comparison records.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path file);

  void append(const ComparisonRecord& r);
  std::vector<ComparisonRecord> snapshot() const;

 private:
  std::filesystem::path file_;
  mutable std::shared_mutex mu_;
  std::vector<ComparisonRecord> records_;
};

struct HistoryEntry {
  std::string kind;  // "reason" | "widgets" | "apply"
  nlohmann::json request;
  nlohmann::json recommendations;         // reason
  std::vector<std::string> chosen_specs;  // widgets
  std::optional<nlohmann::json> op;       // apply
  bool from_original = false;             // apply: op applied to the original image
  std::string image_handle;               // apply: result
};

struct Session {
  std::string id;
  TaskContext context;
  std::string original_image;
  std::string current_image;
  std::vector<HistoryEntry> history;
  std::map<Aspect, AggregatedRecommendation> latest;  // last reason result
};

nlohmann::json to_json(const Session& s);

/// Pure request handlers behind the HTTP routes. Bodies and results are JSON;
/// failures are crowdgen::Error with the kind that selects the status code.
class Engine {
 public:
  explicit Engine(EngineConfig config);

  const EngineConfig& config() const { return config_; }
  ImageStore& images() { return images_; }

  /// Replaces the LLM transport (tests, alternative providers).
  void set_chat_backend(std::shared_ptr<ChatBackend> backend);

  nlohmann::json reason(const nlohmann::json& body);
  nlohmann::json widgets(const nlohmann::json& body);
  nlohmann::json emit(const nlohmann::json& body);

  struct ApplyResult {
    std::string handle;
    ImageBuffer image;
  };
  ApplyResult apply_image(const nlohmann::json& body);

  nlohmann::json create_session(const nlohmann::json& body);
  nlohmann::json get_session(const std::string& id) const;
  /// Re-applies the session's recorded ops to its original image.
  ImageBuffer replay_session(const std::string& id) const;

  nlohmann::json library_summary() const;
  nlohmann::json append_library_response(const nlohmann::json& body);
  nlohmann::json catalog() const;

  nlohmann::json study_plan(const nlohmann::json& body);
  nlohmann::json study_record(const nlohmann::json& body);
  nlohmann::json study_simulate(const nlohmann::json& body);
  std::vector<AnalysisRow> study_results(Grouping grouping) const;

 private:
  std::optional<TaskContext> named_task(const std::string& name) const;
  TaskContext context_from(const nlohmann::json& body, const Session* session) const;
  Session& session_locked(const std::string& id);
  void persist_session(const Session& s) const;
  ChatBackend* chat_backend();

  EngineConfig config_;
  ImageStore images_;
  LibraryStore library_;
  RecordStore records_;
  std::map<std::string, TaskContext> named_tasks_;

  std::mutex chat_mu_;
  std::shared_ptr<ChatBackend> chat_;
  std::unique_ptr<Transcript> transcript_;

  mutable std::mutex sessions_mu_;
  std::map<std::string, Session> sessions_;

  mutable std::shared_mutex study_mu_;
  std::optional<StudyPlan> plan_;
  std::optional<int> plan_n_;
};

/// HTTP routes under /v1 over an Engine.
class HttpServer {
 public:
  explicit HttpServer(Engine& engine);
  ~HttpServer();

  /// Binds the socket; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// JSON error body {"error": {"kind", "message", "details"}}.
nlohmann::json error_json(const Error& e);

}  // namespace crowdgen
