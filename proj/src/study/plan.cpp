#include <algorithm>
#include <istream>
#include <ostream>

#include "crowdgen/error.hpp"
#include "crowdgen/rng.hpp"
#include "crowdgen/study.hpp"

namespace crowdgen {

using nlohmann::json;

const std::vector<ComparisonPair>& enumerate_pairs() {
  static const std::vector<ComparisonPair> pairs = [] {
    const LibraryMode w10 = LibraryMode::withlib(10), w25 = LibraryMode::withlib(25),
                      w30 = LibraryMode::withlib(30), none = LibraryMode::withoutlib();
    return std::vector<ComparisonPair>{
        {w10, w25}, {w10, w30}, {w10, none}, {w25, w30}, {w25, none}, {w30, none}};
  }();
  return pairs;
}

std::optional<std::size_t> canonical_pair_index(const ComparisonPair& pair) {
  const auto& pairs = enumerate_pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i] == pair) return i;
  return std::nullopt;
}

const std::array<std::string, 3>& task_set(int set) {
  static const std::array<std::string, 3> set1 = {"image_adjust_exposure", "image_adjust_temperature",
                                                  "design_align_text"};
  static const std::array<std::string, 3> set2 = {"image_adjust_tint", "image_change_to_spring",
                                                  "design_position_logo"};
  if (set == 1) return set1;
  if (set == 2) return set2;
  throw Error(ErrorKind::kValidation, "task set must be 1 or 2");
}

Aspect latin_square_aspect(int row, int task_index) {
  // Row r shifts the (predictability, efficiency, explorability) order by r.
  return kAllAspects[static_cast<std::size_t>((row + task_index) % 3)];
}

namespace {

const std::array<std::array<int, 3>, 6>& task_permutations() {
  static const auto perms = [] {
    std::array<std::array<int, 3>, 6> out{};
    std::array<int, 3> p = {0, 1, 2};
    for (auto& slot : out) {
      slot = p;
      std::next_permutation(p.begin(), p.end());
    }
    return out;
  }();
  return perms;
}

std::string participant_id(int index, int n) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(n).size());
  std::string digits = std::to_string(index + 1);
  return "p" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

const Assignment* StudyPlan::find(std::string_view id) const {
  for (const auto& a : participants)
    if (a.participant_id == id) return &a;
  return nullptr;
}

StudyPlan plan_study(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::kValidation, "n_participants must be positive");
  StudyPlan plan;
  plan.seed = seed;
  Rng rng(seed);
  const auto& perms = task_permutations();
  for (int p = 0; p < n; ++p) {
    Assignment a;
    a.participant_id = participant_id(p, n);
    a.task_set = p % 2 + 1;
    const int within = p / 2;
    a.aspect_row = within % 3;
    a.permutation = (within / 3) % 6;
    const auto& tasks = task_set(a.task_set);
    const auto& perm = perms[static_cast<std::size_t>(a.permutation)];
    for (std::size_t i = 0; i < 3; ++i) {
      const int t = perm[i];
      a.task_order[i] = tasks[static_cast<std::size_t>(t)];
      a.aspects[i] = latin_square_aspect(a.aspect_row, t);
    }
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<ComparisonPair> pairs = enumerate_pairs();
      rng.shuffle(pairs);
      for (const auto& pair : pairs) a.presentations.push_back({a.task_order[i], a.aspects[i], pair});
    }
    plan.participants.push_back(std::move(a));
  }
  return plan;
}

namespace {

json pair_json(const ComparisonPair& p) {
  return {{"left", p.left.to_string()}, {"right", p.right.to_string()}};
}

}  // namespace

json to_json(const StudyPlan& plan) {
  json participants = json::array();
  for (const auto& a : plan.participants) {
    json pres = json::array();
    for (const auto& p : a.presentations)
      pres.push_back({{"task", p.task}, {"aspect", to_string(p.aspect)}, {"pair", pair_json(p.pair)}});
    json aspects = json::object();
    for (std::size_t i = 0; i < 3; ++i) aspects[a.task_order[i]] = to_string(a.aspects[i]);
    participants.push_back({{"participant_id", a.participant_id},
                            {"task_set", a.task_set},
                            {"permutation", a.permutation},
                            {"aspect_row", a.aspect_row},
                            {"task_order", a.task_order},
                            {"aspects", aspects},
                            {"presentations", pres}});
  }
  return {{"seed", plan.seed}, {"participants", participants}};
}

json to_json(const ComparisonRecord& r) {
  json out = {{"participant_id", r.participant_id},
              {"task", r.task},
              {"aspect", to_string(r.aspect)},
              {"pair", pair_json(r.pair)},
              {"selection", r.selection == Side::kLeft ? "left" : "right"}};
  if (r.reason) out["reason"] = *r.reason;
  return out;
}

ComparisonRecord comparison_record_from_json(const json& doc) {
  auto bad = [](const std::string& path, const std::string& msg) {
    throw Error(ErrorKind::kValidation, "invalid comparison record", {path + ": " + msg});
  };
  if (!doc.is_object()) bad("$", "expected object");
  auto str = [&](const char* key) -> std::string {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string() || it->get_ref<const std::string&>().empty())
      bad(std::string("$.") + key, "expected non-empty string");
    return it->get<std::string>();
  };
  ComparisonRecord r;
  r.participant_id = str("participant_id");
  r.task = str("task");
  auto aspect = aspect_from_id(str("aspect"));
  if (!aspect) bad("$.aspect", "unknown aspect");
  r.aspect = *aspect;
  auto pit = doc.find("pair");
  if (pit == doc.end() || !pit->is_object() || !pit->contains("left") || !pit->contains("right") ||
      !(*pit)["left"].is_string() || !(*pit)["right"].is_string())
    bad("$.pair", "expected {left, right}");
  try {
    r.pair = {LibraryMode::parse((*pit)["left"].get<std::string>()),
              LibraryMode::parse((*pit)["right"].get<std::string>())};
  } catch (const Error& e) {
    bad("$.pair", e.what());
  }
  const std::string sel = str("selection");
  if (sel == "left") {
    r.selection = Side::kLeft;
  } else if (sel == "right") {
    r.selection = Side::kRight;
  } else {
    bad("$.selection", "expected left or right");
  }
  if (auto it = doc.find("reason"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) bad("$.reason", "expected string");
    r.reason = it->get<std::string>();
  }
  if (!canonical_pair_index(r.pair))
    throw Error(ErrorKind::kConflict, "pair is not one of the canonical comparisons",
                {r.pair.left.to_string() + " vs " + r.pair.right.to_string()});
  return r;
}

std::vector<ComparisonRecord> read_records_jsonl(std::istream& in) {
  std::vector<ComparisonRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded())
      throw Error(ErrorKind::kValidation, "malformed JSON-lines record", {"line " + std::to_string(lineno)});
    try {
      out.push_back(comparison_record_from_json(doc));
    } catch (const Error& e) {
      std::vector<std::string> details;
      for (const auto& d : e.details()) details.push_back("line " + std::to_string(lineno) + ": " + d);
      throw Error(e.kind(), e.what(), details);
    }
  }
  return out;
}

void write_records_jsonl(std::ostream& out, const std::vector<ComparisonRecord>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

SimulatedRaterModel SimulatedRaterModel::constant(double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kValidation, "probability must be in [0, 1]");
  return {[p](const std::string&, Aspect, const ComparisonPair&) { return p; }, seed};
}

std::vector<ComparisonRecord> simulate_raters(const StudyPlan& plan, const SimulatedRaterModel& model) {
  Rng rng(model.seed);
  std::vector<ComparisonRecord> out;
  for (const auto& a : plan.participants) {
    for (const auto& p : a.presentations) {
      const double prob = model.prefer_larger(p.task, p.aspect, p.pair);
      if (!(prob >= 0.0 && prob <= 1.0))
        throw Error(ErrorKind::kValidation, "rater model returned a probability outside [0, 1]");
      const bool larger = rng.bernoulli(prob);
      const bool left_larger = p.pair.left.responses() > p.pair.right.responses();
      out.push_back({a.participant_id, p.task, p.aspect, p.pair,
                     larger == left_larger ? Side::kLeft : Side::kRight, std::nullopt});
    }
  }
  return out;
}

}  // namespace crowdgen
