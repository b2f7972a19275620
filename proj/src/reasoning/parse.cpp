#include <cctype>
#include <regex>

#include "crowdgen/error.hpp"
#include "crowdgen/reasoning.hpp"

namespace crowdgen {

namespace {

using nlohmann::json;

// Removes ``` fence markers (with an optional language word) so the template's
// inline fences do not break JSON parsing.
std::string strip_fences(std::string_view raw) {
  static const std::regex fence("```[A-Za-z_]*");
  return std::regex_replace(std::string(raw), fence, "");
}

// Index one past the brace matching raw[open], honoring JSON strings.
std::optional<std::size_t> match_brace(const std::string& s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::nullopt;
}

std::optional<json> try_parse(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  return doc;
}

// Object value following `"key":` anywhere in the text.
std::optional<json> object_after_key(const std::string& s, const std::string& key) {
  const std::regex pattern("\"" + key + "\"\\s*:\\s*\\{");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), pattern); it != std::sregex_iterator();
       ++it) {
    const std::size_t open = static_cast<std::size_t>(it->position() + it->length() - 1);
    if (auto end = match_brace(s, open))
      if (auto doc = try_parse(s.substr(open, *end - open))) return doc;
  }
  return std::nullopt;
}

struct Extracted {
  json widget;     // task -> aspect -> name, or aspect -> name
  json reasoning;  // may be null
};

std::optional<Extracted> extract(const std::string& text) {
  // Whole outermost document first.
  if (auto open = text.find('{'); open != std::string::npos) {
    if (auto end = match_brace(text, open)) {
      if (auto doc = try_parse(text.substr(open, *end - open));
          doc && doc->contains("widget") && (*doc)["widget"].is_object())
        return Extracted{(*doc)["widget"], doc->value("reasoning", json())};
    }
  }
  // Template layout with missing commas: recover the blocks individually.
  auto widget = object_after_key(text, "widget");
  if (!widget) return std::nullopt;
  json reasoning = json::object();
  for (auto a : kAllAspects) {
    const std::string key = std::string(to_string(a)) + "_reasoning";
    if (auto r = object_after_key(text, key)) reasoning[key] = *r;
  }
  return Extracted{*widget, reasoning};
}

std::string rationale_for(const json& reasoning, Aspect aspect, WidgetKind chosen) {
  if (!reasoning.is_object()) return {};
  auto it = reasoning.find(std::string(to_string(aspect)) + "_reasoning");
  if (it == reasoning.end()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (!it->is_object()) return {};
  std::string first;
  for (const auto& [name, text] : it->items()) {
    if (!text.is_string()) continue;
    if (first.empty()) first = text.get<std::string>();
    try {
      if (parse_widget_name(name) == chosen) return text.get<std::string>();
    } catch (const Error&) {
    }
  }
  return first;
}

}  // namespace

ReasonedWidgetSet parse_reasoning_response(std::string_view raw,
                                           const std::vector<Aspect>& requested,
                                           std::string_view task_name) {
  const std::string text = strip_fences(raw);
  auto found = extract(text);
  if (!found) fail(ErrorKind::kValidation, "no JSON document with a \"widget\" object found");

  // "widget" is {task: {aspect: name}}; tolerate the task level being dropped.
  json choices;
  bool flat = false;
  for (auto a : kAllAspects)
    if (found->widget.contains(std::string(to_string(a))) &&
        found->widget[std::string(to_string(a))].is_string())
      flat = true;
  if (flat) {
    choices = found->widget;
  } else if (!task_name.empty() && found->widget.contains(std::string(task_name))) {
    choices = found->widget[std::string(task_name)];
  } else {
    for (const auto& [k, v] : found->widget.items())
      if (v.is_object()) {
        choices = v;
        break;
      }
  }
  if (!choices.is_object()) fail(ErrorKind::kValidation, "\"widget\" holds no per-task object");

  ReasonedWidgetSet out;
  out.task_name = std::string(task_name);
  for (auto a : requested) {
    const std::string key(to_string(a));
    json value;
    for (const auto& [k, v] : choices.items()) {
      std::string lower = k;
      for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (lower == key) value = v;
    }
    if (!value.is_string())
      throw Error(ErrorKind::kValidation, "reply is missing aspect '" + key + "'", {key});
    const WidgetKind w = parse_widget_name(value.get<std::string>());
    out.per_aspect[a] = {w, rationale_for(found->reasoning, a, w)};
  }
  return out;
}

}  // namespace crowdgen
