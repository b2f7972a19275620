#include "crowdgen/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "crowdgen/error.hpp"

namespace crowdgen {

int AggregatedRecommendation::score(WidgetKind w) const {
  auto it = scores.find(w);
  return it == scores.end() ? 0 : it->second;
}

std::vector<WidgetKind> AggregatedRecommendation::ranking() const {
  std::vector<WidgetKind> out;
  for (const auto& [w, s] : scores)
    if (s > 0) out.push_back(w);
  std::sort(out.begin(), out.end(), [&](WidgetKind a, WidgetKind b) {
    if (score(a) != score(b)) return score(a) > score(b);
    return to_string(a) < to_string(b);
  });
  return out;
}

std::map<Aspect, AggregatedRecommendation> fold_passes(const TaskContext& ctx,
                                                       const std::vector<ReasonedWidgetSet>& passes,
                                                       LibraryMode mode) {
  std::map<Aspect, AggregatedRecommendation> out;
  for (auto a : ctx.aspects) {
    auto& rec = out[a];
    rec.task_name = ctx.name;
    rec.aspect = a;
    rec.k = static_cast<int>(passes.size());
    rec.library_mode = mode;
  }
  for (const auto& pass : passes) {
    for (auto a : ctx.aspects) {
      auto it = pass.per_aspect.find(a);
      if (it == pass.per_aspect.end())
        fail(ErrorKind::kBackend, "reasoning pass is missing aspect " + std::string(to_string(a)));
      auto& rec = out[a];
      ++rec.scores[it->second.widget];
      auto& reasons = rec.rationales[it->second.widget];
      const auto& text = it->second.rationale;
      if (!text.empty() && std::find(reasons.begin(), reasons.end(), text) == reasons.end())
        reasons.push_back(text);
    }
  }
  // Rationale lists are kept in a canonical order so the fold is independent
  // of pass order.
  for (auto& [a, rec] : out)
    for (auto& [w, reasons] : rec.rationales) std::sort(reasons.begin(), reasons.end());
  return out;
}

std::map<Aspect, AggregatedRecommendation> aggregate(const TaskContext& ctx,
                                                     const PreferenceLibrary& lib,
                                                     const ReasonerConfig& config, int k,
                                                     ChatBackend* backend) {
  if (k < 1) fail(ErrorKind::kValidation, "iteration count k must be >= 1");
  const PreferenceLibrary view = library_for_mode(lib, config.library_mode, config.library_seed);

  std::vector<ReasonedWidgetSet> passes;
  passes.reserve(static_cast<std::size_t>(k));
  if (config.backend == Backend::kOracle) {
    for (int i = 0; i < k; ++i)
      passes.push_back(reason_once_oracle(ctx, view, config.seed + static_cast<std::uint64_t>(i),
                                          config.top_k));
  } else {
    std::unique_ptr<HttpChatBackend> owned;
    if (!backend) {
      owned = std::make_unique<HttpChatBackend>(config.llm);
      backend = owned.get();
    }
    std::vector<std::future<ReasonedWidgetSet>> futures;
    for (int i = 0; i < k; ++i)
      futures.push_back(std::async(std::launch::async, [&] {
        return reason_once_llm(ctx, view, *backend, config.llm.max_retries, config.transcript);
      }));
    // Wait for every call before rethrowing so no task outlives `view`.
    std::exception_ptr first_error;
    for (auto& f : futures) {
      try {
        passes.push_back(f.get());
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  }
  return fold_passes(ctx, passes, config.library_mode);
}

std::map<WidgetKind, double> normalize_scores(const AggregatedRecommendation& rec, int target) {
  if (rec.k < 1) fail(ErrorKind::kValidation, "recommendation has k < 1");
  std::map<WidgetKind, double> out;
  for (const auto& [w, s] : rec.scores) out[w] = static_cast<double>(s) * target / rec.k;
  return out;
}

std::map<WidgetKind, int> normalize_scores_integer(const AggregatedRecommendation& rec,
                                                   int target) {
  if (rec.k < 1) fail(ErrorKind::kValidation, "recommendation has k < 1");
  struct Share {
    WidgetKind w;
    long long floor_part;
    long long remainder;  // in units of 1/k
    int raw;
  };
  std::vector<Share> shares;
  long long assigned = 0;
  for (const auto& [w, s] : rec.scores) {
    const long long scaled = static_cast<long long>(s) * target;
    shares.push_back({w, scaled / rec.k, scaled % rec.k, s});
    assigned += scaled / rec.k;
  }
  std::vector<std::size_t> order(shares.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (shares[a].remainder != shares[b].remainder) return shares[a].remainder > shares[b].remainder;
    if (shares[a].raw != shares[b].raw) return shares[a].raw > shares[b].raw;
    return shares[a].w < shares[b].w;
  });
  long long left = target - assigned;
  for (std::size_t i = 0; left > 0 && i < order.size(); ++i, --left) ++shares[order[i]].floor_part;

  std::map<WidgetKind, int> out;
  for (const auto& s : shares) out[s.w] = static_cast<int>(s.floor_part);
  return out;
}

nlohmann::json to_json(const AggregatedRecommendation& rec) {
  const auto normalized = normalize_scores_integer(rec);
  nlohmann::json widgets = nlohmann::json::array();
  for (auto w : rec.ranking()) {
    auto it = rec.rationales.find(w);
    widgets.push_back({{"kind", std::string(to_string(w))},
                       {"score", rec.score(w)},
                       {"normalized_score", normalized.at(w)},
                       {"reasons", it == rec.rationales.end() ? nlohmann::json::array()
                                                              : nlohmann::json(it->second)}});
  }
  return {{"task", rec.task_name},
          {"aspect", std::string(to_string(rec.aspect))},
          {"widgets", widgets},
          {"k", rec.k},
          {"library_mode", rec.library_mode.to_string()}};
}

}  // namespace crowdgen
