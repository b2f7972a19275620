#include "crowdgen/preference_library.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "crowdgen/error.hpp"
#include "crowdgen/rng.hpp"

namespace crowdgen {

using nlohmann::json;

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string at(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

void check_response(const json& r, const std::string& path, std::set<std::string>& raters,
                    std::vector<std::string>& out) {
  if (!r.is_object()) {
    out.push_back(path + ": expected object");
    return;
  }
  auto rater = r.find("rater_id");
  if (rater == r.end() || !rater->is_string() || rater->get<std::string>().empty()) {
    out.push_back(path + ".rater_id: missing or not a non-empty string");
  } else if (!raters.insert(rater->get<std::string>()).second) {
    out.push_back(path + ".rater_id: duplicate rater '" + rater->get<std::string>() +
                  "' in this aspect");
  }
  auto widget = r.find("widget");
  if (widget == r.end() || !widget->is_string()) {
    out.push_back(path + ".widget: missing or not a string");
  } else if (!widget_from_id(widget->get<std::string>())) {
    out.push_back(path + ".widget: unknown widget '" + widget->get<std::string>() + "'");
  }
  auto reason = r.find("reason");
  if (reason == r.end() || !reason->is_string() || blank(reason->get<std::string>())) {
    out.push_back(path + ".reason: missing or blank");
  }
}

void check_task(const json& t, const std::string& path, std::set<std::string>& names,
                std::vector<std::string>& out) {
  if (!t.is_object()) {
    out.push_back(path + ": expected object");
    return;
  }
  auto name = t.find("name");
  if (name == t.end() || !name->is_string() || name->get<std::string>().empty()) {
    out.push_back(path + ".name: missing or not a non-empty string");
  } else if (!names.insert(name->get<std::string>()).second) {
    out.push_back(path + ".name: duplicate task name '" + name->get<std::string>() + "'");
  }
  auto desc = t.find("description");
  if (desc == t.end() || !desc->is_string() || blank(desc->get<std::string>()))
    out.push_back(path + ".description: missing or blank");

  if (auto tags = t.find("tags"); tags != t.end()) {
    if (!tags->is_array()) {
      out.push_back(path + ".tags: expected array");
    } else {
      for (std::size_t i = 0; i < tags->size(); ++i) {
        const auto& tag = (*tags)[i];
        if (!tag.is_string() || !tag_from_id(tag.get<std::string>()))
          out.push_back(at(path + ".tags", i) + ": unknown tag " + tag.dump());
      }
    }
  }

  auto responses = t.find("responses");
  if (responses == t.end() || !responses->is_object()) {
    out.push_back(path + ".responses: missing or not an object");
    return;
  }
  for (const auto& [key, list] : responses->items()) {
    const std::string rpath = path + ".responses." + key;
    if (!aspect_from_id(key)) {
      out.push_back(rpath + ": unknown aspect '" + key + "'");
      continue;
    }
    if (!list.is_array()) {
      out.push_back(rpath + ": expected array");
      continue;
    }
    std::set<std::string> raters;
    for (std::size_t i = 0; i < list.size(); ++i) check_response(list[i], at(rpath, i), raters, out);
  }
}

void check_new_response(const TaskRecord& task, Aspect aspect, const PreferenceResponse& r) {
  std::vector<std::string> problems;
  if (r.rater_id.empty()) problems.push_back("rater_id: empty");
  if (blank(r.reason)) problems.push_back("reason: blank");
  if (auto it = task.responses.find(aspect); it != task.responses.end()) {
    for (const auto& existing : it->second)
      if (existing.rater_id == r.rater_id)
        problems.push_back("rater_id: '" + r.rater_id + "' already answered " + task.name + "/" +
                           std::string(to_string(aspect)));
  }
  if (!problems.empty()) throw Error(ErrorKind::kConflict, "response rejected", problems);
}

}  // namespace

const TaskRecord* PreferenceLibrary::find(std::string_view name) const {
  for (const auto& t : tasks)
    if (t.name == name) return &t;
  return nullptr;
}

std::size_t PreferenceLibrary::response_count() const {
  std::size_t n = 0;
  for (const auto& t : tasks)
    for (const auto& [aspect, list] : t.responses) n += list.size();
  return n;
}

LibraryMode LibraryMode::withlib(int n) {
  if (n <= 0) fail(ErrorKind::kValidation, "withlib size must be positive");
  return LibraryMode(n);
}

LibraryMode LibraryMode::parse(std::string_view text) {
  if (text == "withoutlib") return withoutlib();
  constexpr std::string_view prefix = "withlib";
  if (text.substr(0, prefix.size()) == prefix) {
    std::string_view rest = text.substr(prefix.size());
    if (rest.size() >= 2 && rest.front() == '(' && rest.back() == ')')
      rest = rest.substr(1, rest.size() - 2);
    int n = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
    if (ec == std::errc() && ptr == rest.data() + rest.size() && n > 0) return withlib(n);
  }
  throw Error(ErrorKind::kValidation, "invalid library mode '" + std::string(text) + "'");
}

std::string LibraryMode::to_string() const {
  return n_ > 0 ? "withlib" + std::to_string(n_) : "withoutlib";
}

int FrequencyTable::count(WidgetKind w) const {
  auto it = counts.find(w);
  return it == counts.end() ? 0 : it->second;
}

double FrequencyTable::share(WidgetKind w) const {
  return total == 0 ? 0.0 : static_cast<double>(count(w)) / total;
}

std::optional<WidgetKind> FrequencyTable::argmax() const {
  std::optional<WidgetKind> best;
  int best_count = 0;
  for (auto w : kAllWidgets) {
    int c = count(w);
    if (c > best_count) {
      best = w;
      best_count = c;
    }
  }
  return best;
}

std::vector<std::string> validate_library_json(const json& doc) {
  std::vector<std::string> out;
  if (!doc.is_object()) {
    out.push_back("$: expected object");
    return out;
  }
  auto version = doc.find("version");
  if (version == doc.end() || !version->is_string())
    out.push_back("version: missing or not a string");
  auto tasks = doc.find("tasks");
  if (tasks == doc.end() || !tasks->is_array()) {
    out.push_back("tasks: missing or not an array");
    return out;
  }
  if (tasks->empty()) out.push_back("tasks: must contain at least one task");
  std::set<std::string> names;
  for (std::size_t i = 0; i < tasks->size(); ++i) check_task((*tasks)[i], at("tasks", i), names, out);
  return out;
}

PreferenceLibrary parse_library(const json& doc) {
  if (auto problems = validate_library_json(doc); !problems.empty())
    throw Error(ErrorKind::kValidation, "library document failed validation", std::move(problems));

  PreferenceLibrary lib;
  lib.version = doc.at("version").get<std::string>();
  for (const auto& t : doc.at("tasks")) {
    TaskRecord rec;
    rec.name = t.at("name").get<std::string>();
    rec.description = t.at("description").get<std::string>();
    if (t.contains("tags"))
      for (const auto& tag : t.at("tags")) rec.tags.insert(*tag_from_id(tag.get<std::string>()));
    for (const auto& [key, list] : t.at("responses").items()) {
      auto& dst = rec.responses[*aspect_from_id(key)];
      for (const auto& r : list)
        dst.push_back({r.at("rater_id").get<std::string>(),
                       *widget_from_id(r.at("widget").get<std::string>()),
                       r.at("reason").get<std::string>()});
    }
    lib.tasks.push_back(std::move(rec));
  }
  return lib;
}

PreferenceLibrary load_library(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kValidation, "library is not valid JSON", {std::string("$: ") + e.what()});
  }
  return parse_library(doc);
}

PreferenceLibrary load_library_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open library file " + path.string());
  return load_library(in);
}

json to_json(const PreferenceLibrary& lib) {
  json tasks = json::array();
  for (const auto& t : lib.tasks) {
    json tags = json::array();
    for (auto tag : t.tags.to_vector()) tags.push_back(std::string(to_string(tag)));
    json responses = json::object();
    for (const auto& [aspect, list] : t.responses) {
      json arr = json::array();
      for (const auto& r : list)
        arr.push_back({{"rater_id", r.rater_id},
                       {"widget", std::string(to_string(r.widget))},
                       {"reason", r.reason}});
      responses[std::string(to_string(aspect))] = std::move(arr);
    }
    tasks.push_back({{"name", t.name},
                     {"description", t.description},
                     {"tags", std::move(tags)},
                     {"responses", std::move(responses)}});
  }
  return {{"version", lib.version}, {"tasks", std::move(tasks)}};
}

PreferenceLibrary empty_library() { return PreferenceLibrary{"empty", {}}; }

PreferenceLibrary subset_library(const PreferenceLibrary& lib, LibraryMode mode,
                                 std::uint64_t seed) {
  if (!mode.uses_library())
    fail(ErrorKind::kValidation, "subset_library: withoutlib has no subset; use empty_library()");
  const auto n = static_cast<std::size_t>(mode.responses());

  std::set<std::string> ids;
  for (const auto& t : lib.tasks)
    for (const auto& [aspect, list] : t.responses)
      for (const auto& r : list) ids.insert(r.rater_id);
  std::vector<std::string> order(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(order);
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  PreferenceLibrary out{lib.version, {}};
  for (const auto& t : lib.tasks) {
    TaskRecord rec{t.name, t.description, t.tags, {}};
    for (const auto& [aspect, list] : t.responses) {
      if (list.size() < n)
        fail(ErrorKind::kValidation, "subset_library: " + t.name + "/" +
                                         std::string(to_string(aspect)) + " has only " +
                                         std::to_string(list.size()) + " responses, " +
                                         std::to_string(n) + " requested");
      std::vector<std::size_t> idx(list.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return rank.at(list[a].rater_id) < rank.at(list[b].rater_id);
      });
      idx.resize(n);
      std::sort(idx.begin(), idx.end());
      auto& dst = rec.responses[aspect];
      for (auto i : idx) dst.push_back(list[i]);
    }
    out.tasks.push_back(std::move(rec));
  }
  return out;
}

FrequencyTable aggregate_frequencies(const TaskRecord& task, Aspect aspect) {
  auto it = task.responses.find(aspect);
  if (it == task.responses.end())
    fail(ErrorKind::kValidation,
         "task " + task.name + " has no responses for " + std::string(to_string(aspect)));
  FrequencyTable table;
  for (const auto& r : it->second) ++table.counts[r.widget];
  table.total = static_cast<int>(it->second.size());
  return table;
}

nlohmann::ordered_json serialize_for_prompt(const PreferenceLibrary& lib) {
  nlohmann::ordered_json tasks = nlohmann::ordered_json::array();
  for (const auto& t : lib.tasks) {
    nlohmann::ordered_json freq = nlohmann::ordered_json::object();
    nlohmann::ordered_json reasons = nlohmann::ordered_json::object();
    for (const auto& [aspect, list] : t.responses) {
      const auto table = aggregate_frequencies(t, aspect);
      nlohmann::ordered_json counts = nlohmann::ordered_json::object();
      for (auto w : kAllWidgets)
        if (int c = table.count(w); c > 0) counts[std::string(to_string(w))] = c;
      freq[std::string(to_string(aspect))] = std::move(counts);

      nlohmann::ordered_json rs = nlohmann::ordered_json::array();
      for (const auto& r : list)
        rs.push_back({{"widget", std::string(to_string(r.widget))}, {"reason", r.reason}});
      reasons[std::string(to_string(aspect))] = std::move(rs);
    }
    tasks.push_back({{"name", t.name},
                     {"description", t.description},
                     {"widget_frequency", std::move(freq)},
                     {"widget_reasons", std::move(reasons)}});
  }
  return {{"version", lib.version}, {"tasks", std::move(tasks)}};
}

void append_response(PreferenceLibrary& lib, std::string_view task, Aspect aspect,
                     PreferenceResponse response) {
  auto it = std::find_if(lib.tasks.begin(), lib.tasks.end(),
                         [&](const TaskRecord& t) { return t.name == task; });
  if (it == lib.tasks.end())
    throw Error(ErrorKind::kConflict, "unknown task '" + std::string(task) + "'");
  check_new_response(*it, aspect, response);
  it->responses[aspect].push_back(std::move(response));
}

}  // namespace crowdgen
