#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>

#include "crowdgen/error.hpp"
#include "crowdgen/service.hpp"

namespace crowdgen {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw Error(ErrorKind::kValidation, "invalid config value", {key + ": expected a number, got '" + value + "'"});
  return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

EngineConfig parse_engine_config(std::istream& in, const fs::path& base_dir) {
  EngineConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::kValidation, "invalid config line", {"line " + std::to_string(lineno) + ": expected key = value"});
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "library") {
      c.library_path = resolve(base_dir, value);
    } else if (key == "tasks") {
      c.tasks_path = resolve(base_dir, value);
    } else if (key == "mode") {
      c.default_mode = LibraryMode::parse(value);
    } else if (key == "k") {
      c.k = parse_number<int>(key, value);
    } else if (key == "backend") {
      if (value == "oracle") c.backend = Backend::kOracle;
      else if (value == "llm") c.backend = Backend::kLlm;
      else throw Error(ErrorKind::kValidation, "invalid config value", {"backend: expected oracle or llm"});
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "library_seed") {
      c.library_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "llm_endpoint") {
      c.llm.endpoint = value;
    } else if (key == "llm_model") {
      c.llm.model = value;
    } else if (key == "llm_temperature") {
      c.llm.temperature = parse_number<double>(key, value);
    } else if (key == "llm_max_retries") {
      c.llm.max_retries = parse_number<int>(key, value);
    } else if (key == "llm_timeout") {
      c.llm.timeout_seconds = parse_number<int>(key, value);
    } else if (key == "data_dir") {
      c.data_dir = resolve(base_dir, value);
    } else if (key == "transcript") {
      c.transcript_path = resolve(base_dir, value);
    } else if (key == "listen") {
      const auto colon = value.rfind(':');
      if (colon == std::string::npos)
        throw Error(ErrorKind::kValidation, "invalid config value", {"listen: expected host:port"});
      c.listen_host = value.substr(0, colon);
      c.listen_port = parse_number<int>(key, value.substr(colon + 1));
    } else if (key == "api_key" || key == "llm_key") {
      throw Error(ErrorKind::kValidation, "credentials are read from CROWDGEN_LLM_KEY only", {key});
    } else {
      throw Error(ErrorKind::kValidation, "unknown config key", {"line " + std::to_string(lineno) + ": " + key});
    }
  }
  return c;
}

void apply_env_overrides(EngineConfig& c) {
  if (const char* dir = std::getenv("CROWDGEN_DATA_DIR"); dir && *dir) c.data_dir = dir;
  c.llm.api_key = llm_key_from_env();
}

EngineConfig load_engine_config(const std::optional<fs::path>& file) {
  EngineConfig c;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorKind::kIo, "cannot read config file " + file->string());
    c = parse_engine_config(in, file->parent_path());
  }
  apply_env_overrides(c);
  return c;
}

void validate_config(const EngineConfig& c) {
  if (c.k < 1) throw Error(ErrorKind::kValidation, "k must be at least 1");
  if (c.listen_port < 0 || c.listen_port > 65535) throw Error(ErrorKind::kValidation, "listen port out of range");
  if (c.llm.max_retries < 0) throw Error(ErrorKind::kValidation, "llm_max_retries must be non-negative");
  if (!fs::exists(c.library_path)) throw Error(ErrorKind::kIo, "library file not found: " + c.library_path.string());
}

nlohmann::json to_json(const EngineConfig& c) {
  nlohmann::json out = {{"library", c.library_path.string()},
                        {"tasks", c.tasks_path.string()},
                        {"mode", c.default_mode.to_string()},
                        {"k", c.k},
                        {"backend", c.backend == Backend::kOracle ? "oracle" : "llm"},
                        {"seed", c.seed},
                        {"library_seed", c.library_seed},
                        {"llm_endpoint", c.llm.endpoint},
                        {"llm_model", c.llm.model},
                        {"data_dir", c.data_dir.string()},
                        {"listen", c.listen_host + ":" + std::to_string(c.listen_port)},
                        {"llm_key_set", !c.llm.api_key.empty()}};
  if (c.transcript_path) out["transcript"] = c.transcript_path->string();
  return out;
}

}  // namespace crowdgen
