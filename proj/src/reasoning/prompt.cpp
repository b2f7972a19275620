#include <algorithm>
#include <sstream>

#include "crowdgen/error.hpp"
#include "crowdgen/reasoning.hpp"

namespace crowdgen {

namespace {

constexpr std::string_view kSystem =
    "You are a UI design assistant. You reason about which UI widget best serves a user's "
    "content-editing task and answer in JSON.";

constexpr std::string_view kDefinitions =
    "    - Predictability: allows users to obtain results with no surprises or doesn't require "
    "users to deduce how to perform the interaction.\n"
    "    - Efficiency: allows users to perform tasks with a minimum amount of effort.\n"
    "    - Explorability: allows users to explore multiple possibilities and perform functions "
    "with high flexibility.\n";

std::string tag_phrase(TagSet tags) {
  std::vector<std::string> parts;
  if (tags.contains(CapabilityTag::kContinuous)) parts.emplace_back("continuous value adjustment");
  if (tags.contains(CapabilityTag::kDiscrete)) parts.emplace_back("discrete value selection");
  if (tags.contains(CapabilityTag::kColor)) parts.emplace_back("color adjustment");
  if (tags.contains(CapabilityTag::kPosition)) parts.emplace_back("object positioning");
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += (i + 1 == parts.size()) ? " and " : ", ";
    out += parts[i];
  }
  return out;
}

std::string quoted_list(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += (i + 1 == names.size()) ? (names.size() > 2 ? ", and " : " and ") : ", ";
    out += "\"" + names[i] + "\"";
  }
  return out;
}

// Groups library tasks by their curated tags, in first-appearance order.
std::string additional_task_information(const PreferenceLibrary& lib) {
  std::vector<std::pair<TagSet, std::vector<std::string>>> groups;
  for (const auto& t : lib.tasks) {
    if (t.tags.empty()) continue;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == t.tags; });
    if (it == groups.end())
      groups.push_back({t.tags, {t.name}});
    else
      it->second.push_back(t.name);
  }
  std::ostringstream os;
  for (const auto& [tags, names] : groups)
    os << "        - " << quoted_list(names) << (names.size() > 1 ? " are" : " is")
       << " related to " << tag_phrase(tags) << ".\n";
  return os.str();
}

std::string response_template(const TaskContext& ctx, bool with_library) {
  std::ostringstream os;
  os << "{\n    \"reasoning\": {```reasoning\n";
  if (with_library) os << "        \"relevant tasks from the library\": \"<your reasoning>\"\n";
  for (auto a : ctx.aspects)
    os << "\n        \"" << to_string(a) << "_reasoning\": {\n"
       << "            \"<UI widget type>\": \"<your reasoning>\"\n        }\n";
  os << "    ```}\n\n    \"widget\": {```widget\n"
     << "        \"" << (ctx.name.empty() ? std::string("<task_name>") : ctx.name) << "\": {\n";
  for (std::size_t i = 0; i < ctx.aspects.size(); ++i)
    os << "            \"" << to_string(ctx.aspects[i]) << "\": \"<UI widget type>\""
       << (i + 1 < ctx.aspects.size() ? "," : "") << "\n";
  os << "        }\n    ```}\n}\n";
  return os.str();
}

std::string aspect_names(const TaskContext& ctx) {
  std::vector<std::string> names;
  for (auto a : ctx.aspects) names.emplace_back(to_string(a));
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += (i + 1 == names.size()) ? (names.size() > 2 ? ", and " : " and ") : ", ";
    out += names[i];
  }
  return out;
}

struct LibrarySections {
  nlohmann::ordered_json descriptions = nlohmann::ordered_json::object();
  nlohmann::ordered_json frequency = nlohmann::ordered_json::object();
  nlohmann::ordered_json reasons = nlohmann::ordered_json::object();
};

LibrarySections split_sections(const nlohmann::ordered_json& view) {
  LibrarySections out;
  for (const auto& t : view["tasks"]) {
    const std::string name = t["name"];
    out.descriptions[name] = t["description"];
    out.frequency[name] = t["widget_frequency"];
    out.reasons[name] = t["widget_reasons"];
  }
  return out;
}

std::string quoted_aspects(const TaskContext& ctx) {
  std::string out;
  for (std::size_t i = 0; i < ctx.aspects.size(); ++i) {
    if (i > 0) out += (i + 1 == ctx.aspects.size()) ? ", or " : ", ";
    out += "\"" + std::string(display_name(ctx.aspects[i])) + "\"";
  }
  if (ctx.aspects.size() == 2) {
    out = "\"" + std::string(display_name(ctx.aspects[0])) + "\" or \"" +
          std::string(display_name(ctx.aspects[1])) + "\"";
  }
  return out;
}

}  // namespace

std::vector<ChatMessage> PromptBundle::messages() const {
  return {{"system", system}, {"user", user}};
}

PromptBundle build_reasoning_prompt(const TaskContext& ctx, const PreferenceLibrary& lib) {
  PromptBundle bundle;
  bundle.system = std::string(kSystem);

  nlohmann::ordered_json candidates = nlohmann::ordered_json::array();
  for (auto w : kAllWidgets) candidates.push_back(std::string(display_name(w)));
  bundle.serialized_candidates = candidates.dump();

  nlohmann::ordered_json task = {{"task_name", ctx.name}, {"task_description", ctx.description}};
  nlohmann::ordered_json aspects = nlohmann::ordered_json::array();
  for (auto a : ctx.aspects) aspects.push_back(std::string(to_string(a)));
  task["preference_aspect"] = aspects;
  bundle.task_description = task.dump(4);

  const bool with_library = !lib.empty();
  const std::string aspect_list = aspect_names(ctx);
  std::ostringstream os;

  LibrarySections sections;
  if (with_library) {
    const auto view = serialize_for_prompt(lib);
    bundle.serialized_library = view.dump();
    sections = split_sections(view);

    os << "Based on the crowdsourced UI widget preference library, reason UI widget type for the "
          "user task. You should follow the steps below for the reasoning.\n\n"
       << "First, please take the definitions below:\n"
       << kDefinitions << "\n"
       << "Second, information on the crowdsourced UI widget preference library is in the "
          "prompt:\n"
       << "    - Crowdsourced UI widget preference library task description: detailed "
          "descriptions of all the tasks.\n"
       << "    - Crowdsourced UI widget preference library widget frequency: the frequency of "
          "user-preferred widgets. Large numbers mean the corresponding widget is preferred by "
          "more people.\n"
       << "    - Crowdsourced UI widget preference library widget reasons: the reasons for "
          "user-preferred widgets.\n\n"
       << "Third, search for the most relevant tasks from the crowdsourced UI widget preference "
          "library.\n"
       << "    - You can compare the given task and the tasks names in the library, and refer to "
          "their task descriptions to help you to find the relevant tasks.\n"
       << "    - Additional task information:\n"
       << additional_task_information(lib) << "\n"
       << "Fourth, reason the most proper UI widget for " << aspect_list << ".\n"
       << "    - Your reasoning should be based on the relevant tasks you found in the library.\n"
       << "    - After you find the relevant tasks, refer to the content of " << quoted_aspects(ctx)
       << " in the widget frequency and widget reasons.\n"
       << "    - You must refer to the widgets of high frequencies of the relevant tasks in "
          "widget frequency.\n"
       << "    - You must refer to widget reasons to help your reasoning.\n"
       << "    - The UI widget you reason must come from the given library.\n\n"
       << "Lastly, based on your reasoning, write down UI widgets for " << aspect_list
       << " in JSON format.\n\n";
  } else {
    os << "Reason UI widget type for the user task. You should follow the steps below for the "
          "reasoning.\n\n"
       << "First, please take the definitions below:\n"
       << kDefinitions << "\n"
       << "Second, reason the most proper UI widget for " << aspect_list << ".\n"
       << "    - Analyze the task requirements in the user task.\n"
       << "    - The UI widget you reason must come from the given UI widget candidates.\n\n"
       << "Lastly, based on your reasoning, write down UI widgets for " << aspect_list
       << " in JSON format.\n\n";
  }

  os << "Refer to the example below to provide your response.\n"
     << "    - Replace the placeholders marked by <> with your response. Do not include <> in "
        "your response.\n"
     << "    - You must keep all the existing information from the example and only replace "
        "placeholders.\n"
     << "    - The response must be in JSON format.\n"
     << response_template(ctx, with_library) << "\n"
     << "User task:\n" << bundle.task_description << "\n\n"
     << "UI widget candidates: " << bundle.serialized_candidates << "\n";

  if (with_library) {
    os << "\nCrowdsourced UI widget preference library task description:\n"
       << sections.descriptions.dump(4) << "\n\n"
       << "Crowdsourced UI widget preference library widget frequency:\n"
       << sections.frequency.dump(4) << "\n\n"
       << "Crowdsourced UI widget preference library widget reasons:\n"
       << sections.reasons.dump(4) << "\n";
  }
  bundle.user = os.str();
  return bundle;
}

}  // namespace crowdgen
