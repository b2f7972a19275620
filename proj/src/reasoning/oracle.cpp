#include <cmath>
#include <cstdio>
#include <sstream>

#include "crowdgen/error.hpp"
#include "crowdgen/reasoning.hpp"
#include "crowdgen/rng.hpp"

namespace crowdgen {

namespace {

bool allowed(WidgetKind w, TagSet ctx_tags) {
  return ctx_tags.empty() || capabilities_of(w).intersects(ctx_tags);
}

std::string format_score(RelevanceScore s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%d.%d", s.tenths() / 10, s.tenths() % 10);
  return buf;
}

std::string fallback_rationale(WidgetKind w, TagSet tags) {
  std::ostringstream os;
  os << "No library evidence applies; " << display_name(w)
     << " is the default control for ";
  if (tags.empty()) {
    os << "untagged tasks.";
  } else {
    auto v = tags.to_vector();
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "/" : "") << to_string(v[i]);
    os << " tasks.";
  }
  return os.str();
}

std::string library_rationale(const RelevanceResult& rel, const PreferenceLibrary& lib,
                              Aspect aspect, WidgetKind w, double share) {
  std::ostringstream os;
  os << "Relevant library tasks: ";
  const std::size_t shown = std::min<std::size_t>(3, rel.ranked.size());
  for (std::size_t i = 0; i < shown; ++i)
    os << (i ? ", " : "") << rel.ranked[i].task_name << " (" << format_score(rel.ranked[i].score)
       << ")";
  if (rel.ranked.size() > shown) os << " and " << rel.ranked.size() - shown << " more";
  os << ". " << display_name(w) << " holds " << static_cast<int>(std::lround(share * 100))
     << "% of the weighted " << to_string(aspect) << " votes.";

  int quoted = 0;
  for (const auto& r : rel.ranked) {
    const TaskRecord* t = lib.find(r.task_name);
    auto it = t->responses.find(aspect);
    if (it == t->responses.end()) continue;
    for (const auto& resp : it->second) {
      if (resp.widget != w) continue;
      os << (quoted == 0 ? " Raters noted: \"" : "; \"") << resp.reason << "\"";
      if (++quoted == 2) break;
    }
    if (quoted == 2) break;
  }
  if (quoted > 0) os << ".";
  return os.str();
}

std::map<WidgetKind, double> votes_from(const RelevanceResult& rel, const TaskContext& ctx,
                                        const PreferenceLibrary& lib, Aspect aspect) {
  std::map<WidgetKind, double> votes;
  for (const auto& r : rel.ranked) {
    const TaskRecord* t = lib.find(r.task_name);
    if (t == nullptr || !t->responses.contains(aspect)) continue;
    const FrequencyTable freq = aggregate_frequencies(*t, aspect);
    if (freq.total == 0) continue;
    for (const auto& [w, c] : freq.counts) {
      if (c == 0 || !allowed(w, ctx.tags)) continue;
      votes[w] += r.score.value() * c / freq.total;
    }
  }
  double sum = 0;
  for (const auto& [w, v] : votes) sum += v;
  if (sum <= 0) return {};
  for (auto& [w, v] : votes) v /= sum;
  return votes;
}

WidgetKind sample(const std::map<WidgetKind, double>& dist, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0;
  WidgetKind last = dist.begin()->first;
  for (auto w : kAllWidgets) {
    auto it = dist.find(w);
    if (it == dist.end()) continue;
    cum += it->second;
    last = w;
    if (u < cum) return w;
  }
  return last;  // rounding left a sliver above the final bucket
}

}  // namespace

std::map<WidgetKind, double> oracle_vote_distribution(const TaskContext& ctx,
                                                      const PreferenceLibrary& lib, Aspect aspect,
                                                      std::size_t top_k) {
  if (lib.empty()) return {};
  const RelevanceResult rel = relevance(ctx, lib, top_k);
  return votes_from(rel, ctx, lib, aspect);
}

ReasonedWidgetSet reason_once_oracle(const TaskContext& ctx, const PreferenceLibrary& lib,
                                     std::uint64_t seed, std::size_t top_k) {
  if (ctx.aspects.empty()) fail(ErrorKind::kValidation, "task context has no aspects");

  ReasonedWidgetSet out;
  out.task_name = ctx.name;
  out.library_responses = lib.response_count();

  RelevanceResult rel;
  if (!lib.empty()) rel = relevance(ctx, lib, top_k);
  for (const auto& r : rel.ranked) out.relevant_tasks.push_back(r.task_name);

  Rng rng(seed);
  for (auto aspect : ctx.aspects) {
    auto dist = rel.ranked.empty() ? std::map<WidgetKind, double>{}
                                   : votes_from(rel, ctx, lib, aspect);
    if (dist.empty()) {
      const WidgetKind w = fallback_widget(ctx.tags);
      out.per_aspect[aspect] = {w, fallback_rationale(w, ctx.tags)};
      continue;
    }
    const WidgetKind w = sample(dist, rng);
    out.per_aspect[aspect] = {w, library_rationale(rel, lib, aspect, w, dist.at(w))};
  }
  return out;
}

}  // namespace crowdgen
