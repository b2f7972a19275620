#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "crowdgen/llm_client.hpp"
#include "crowdgen/preference_library.hpp"
#include "crowdgen/task_model.hpp"

namespace crowdgen {

struct AspectChoice {
  WidgetKind widget;
  std::string rationale;
};

/// One reasoning pass: a widget and rationale per requested aspect.
struct ReasonedWidgetSet {
  std::string task_name;
  std::map<Aspect, AspectChoice> per_aspect;
  std::vector<std::string> relevant_tasks;
  std::size_t library_responses = 0;  // size of the library this pass saw
};

enum class Backend { kOracle, kLlm };

struct ReasonerConfig {
  Backend backend = Backend::kOracle;
  LlmSettings llm;
  LibraryMode library_mode = LibraryMode::withlib(30);
  std::uint64_t seed = 0;          // oracle sampling seed
  std::uint64_t library_seed = 0;  // seed for withlib(n) subsetting
  std::size_t top_k = 0;           // 0: every task with non-zero relevance
  Transcript* transcript = nullptr;
};

struct PromptBundle {
  std::string system;
  std::string user;
  std::string serialized_library;     // empty without a library
  std::string serialized_candidates;
  std::string task_description;

  std::vector<ChatMessage> messages() const;
};

/// Chain-of-thought reasoning prompt. Library sections and the steps that
/// reference them are omitted when `lib` is empty.
PromptBundle build_reasoning_prompt(const TaskContext& ctx, const PreferenceLibrary& lib);

/// Deterministic stand-in for the LLM. Per aspect, relevant tasks vote with
/// weight = relevance score times per-task widget share; votes are limited to
/// widgets sharing a capability with the context, then one widget is drawn
/// from the normalized votes. Without a library (or relevant tasks) the
/// capability fallback is used instead.
ReasonedWidgetSet reason_once_oracle(const TaskContext& ctx, const PreferenceLibrary& lib,
                                     std::uint64_t seed, std::size_t top_k = 0);

/// Normalized vote distribution the oracle samples from for one aspect;
/// empty when the fallback path applies. Exposed for tests and diagnostics.
std::map<WidgetKind, double> oracle_vote_distribution(const TaskContext& ctx,
                                                      const PreferenceLibrary& lib, Aspect aspect,
                                                      std::size_t top_k = 0);

/// Extracts the widget choices from a model reply. Accepts strict JSON or the
/// fenced template layout, with or without surrounding prose.
ReasonedWidgetSet parse_reasoning_response(std::string_view raw,
                                           const std::vector<Aspect>& requested,
                                           std::string_view task_name = {});

ReasonedWidgetSet reason_once_llm(const TaskContext& ctx, const PreferenceLibrary& lib,
                                  ChatBackend& backend, int max_retries,
                                  Transcript* transcript = nullptr);

/// Applies the library mode, then dispatches to the configured backend. For
/// Backend::kLlm a null `backend` means "build an HttpChatBackend from config".
ReasonedWidgetSet reason(const TaskContext& ctx, const PreferenceLibrary& lib,
                         const ReasonerConfig& config, ChatBackend* backend = nullptr);

/// The library a pass under `config` actually sees.
PreferenceLibrary library_for_mode(const PreferenceLibrary& lib, LibraryMode mode,
                                   std::uint64_t library_seed);

}  // namespace crowdgen
