#include "crowdgen/error.hpp"
#include "crowdgen/reasoning.hpp"

namespace crowdgen {

ReasonedWidgetSet reason_once_llm(const TaskContext& ctx, const PreferenceLibrary& lib,
                                  ChatBackend& backend, int max_retries, Transcript* transcript) {
  if (max_retries < 0) fail(ErrorKind::kValidation, "max_retries must be >= 0");
  auto messages = build_reasoning_prompt(ctx, lib).messages();
  std::string last_reply;
  for (int attempt = 0;; ++attempt) {
    last_reply = backend.complete(messages);
    if (transcript) transcript->record(messages, last_reply);
    try {
      auto out = parse_reasoning_response(last_reply, ctx.aspects, ctx.name);
      out.task_name = ctx.name;
      out.library_responses = lib.response_count();
      if (!lib.empty())
        for (const auto& r : relevance(ctx, lib).ranked) out.relevant_tasks.push_back(r.task_name);
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kValidation) throw;
      if (attempt >= max_retries)
        throw Error(ErrorKind::kBackend,
                    "LLM reply unusable after " + std::to_string(attempt + 1) +
                        " attempt(s): " + e.what(),
                    {last_reply});
      messages.push_back({"assistant", last_reply});
      messages.push_back({"user", std::string("Your previous response could not be used: ") +
                                      e.what() +
                                      ". Reply again following the JSON example exactly, with "
                                      "one widget from the candidates for every aspect."});
    }
  }
}

PreferenceLibrary library_for_mode(const PreferenceLibrary& lib, LibraryMode mode,
                                   std::uint64_t library_seed) {
  if (!mode.uses_library()) return empty_library();
  return subset_library(lib, mode, library_seed);
}

ReasonedWidgetSet reason(const TaskContext& ctx, const PreferenceLibrary& lib,
                         const ReasonerConfig& config, ChatBackend* backend) {
  const PreferenceLibrary view = library_for_mode(lib, config.library_mode, config.library_seed);
  if (config.backend == Backend::kOracle) return reason_once_oracle(ctx, view, config.seed, config.top_k);

  if (backend) return reason_once_llm(ctx, view, *backend, config.llm.max_retries, config.transcript);
  HttpChatBackend http(config.llm);
  return reason_once_llm(ctx, view, http, config.llm.max_retries, config.transcript);
}

}  // namespace crowdgen
