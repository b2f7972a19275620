#include "crowdgen/widget_catalog.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "crowdgen/error.hpp"

namespace crowdgen {

namespace {

struct KindInfo {
  WidgetKind kind;
  std::string_view id;
  std::string_view display;
  TagSet caps;
};

using enum CapabilityTag;

constexpr std::array<KindInfo, 8> kKinds = {{
    {WidgetKind::kSlider, "slider", "Slider", {kContinuous, kPosition}},
    {WidgetKind::kDropdown, "dropdown", "Dropdown", {kDiscrete}},
    {WidgetKind::kRadioButtons, "radio_buttons", "Radio Buttons", {kDiscrete}},
    {WidgetKind::kTextField, "text_field", "Text Field", {kContinuous, kPosition}},
    {WidgetKind::kPresetButtons, "preset_buttons", "Preset Buttons", {kDiscrete, kColor, kPosition}},
    {WidgetKind::kColorWheel, "color_wheel", "Color Wheel", {kColor, kContinuous}},
    {WidgetKind::kColorPicker, "color_picker", "Color Picker", {kColor}},
    {WidgetKind::kClickOnImage, "click_on_image", "Click on Image", {kPosition}},
}};

const KindInfo& info(WidgetKind k) { return kKinds[static_cast<std::size_t>(k)]; }

// Lowercase and drop separators so "Preset Buttons" == "preset_buttons".
std::string normalize(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

const std::map<std::string, WidgetKind>& alias_table() {
  static const std::map<std::string, WidgetKind> table = [] {
    std::map<std::string, WidgetKind> t;
    for (const auto& k : kKinds) t.emplace(normalize(k.id), k.kind);
    const std::pair<const char*, WidgetKind> aliases[] = {
        {"sliders", WidgetKind::kSlider},
        {"floatslider", WidgetKind::kSlider},
        {"rangeslider", WidgetKind::kSlider},
        {"dropdownmenu", WidgetKind::kDropdown},
        {"dropdowns", WidgetKind::kDropdown},
        {"radio", WidgetKind::kRadioButtons},
        {"radiobutton", WidgetKind::kRadioButtons},
        {"textbox", WidgetKind::kTextField},
        {"textinput", WidgetKind::kTextField},
        {"textfields", WidgetKind::kTextField},
        {"boundedfloattext", WidgetKind::kTextField},
        {"presetbutton", WidgetKind::kPresetButtons},
        {"presets", WidgetKind::kPresetButtons},
        {"buttonswithpreviewoverlays", WidgetKind::kPresetButtons},
        {"presetbuttonswithpreviewoverlays", WidgetKind::kPresetButtons},
        {"colorwheels", WidgetKind::kColorWheel},
        {"huewheel", WidgetKind::kColorWheel},
        {"colorpickers", WidgetKind::kColorPicker},
        {"clickimage", WidgetKind::kClickOnImage},
        {"clickontheimage", WidgetKind::kClickOnImage},
        {"directclick", WidgetKind::kClickOnImage},
        {"directlyclickingontheimage", WidgetKind::kClickOnImage},
        {"clickingontheimage", WidgetKind::kClickOnImage},
    };
    for (const auto& [alias, kind] : aliases) t.emplace(alias, kind);
    return t;
  }();
  return table;
}

}  // namespace

int TagSet::size() const {
  int n = 0;
  for (auto t : kAllTags) n += contains(t) ? 1 : 0;
  return n;
}

std::vector<CapabilityTag> TagSet::to_vector() const {
  std::vector<CapabilityTag> out;
  for (auto t : kAllTags)
    if (contains(t)) out.push_back(t);
  return out;
}

std::string_view to_string(WidgetKind kind) { return info(kind).id; }

std::string_view to_string(CapabilityTag tag) {
  switch (tag) {
    case kContinuous: return "continuous";
    case kDiscrete: return "discrete";
    case kColor: return "color";
    case kPosition: return "position";
  }
  return "?";
}

std::optional<WidgetKind> widget_from_id(std::string_view id) {
  for (const auto& k : kKinds)
    if (k.id == id) return k.kind;
  return std::nullopt;
}

std::optional<CapabilityTag> tag_from_id(std::string_view id) {
  for (auto t : kAllTags)
    if (to_string(t) == id) return t;
  return std::nullopt;
}

std::string_view display_name(WidgetKind kind) { return info(kind).display; }

TagSet capabilities_of(WidgetKind kind) { return info(kind).caps; }

const std::vector<WidgetKind>& fallback_list(CapabilityTag tag) {
  static const std::vector<WidgetKind> continuous = {WidgetKind::kSlider, WidgetKind::kTextField,
                                                     WidgetKind::kColorWheel};
  static const std::vector<WidgetKind> discrete = {
      WidgetKind::kPresetButtons, WidgetKind::kDropdown, WidgetKind::kRadioButtons};
  static const std::vector<WidgetKind> color = {WidgetKind::kColorPicker, WidgetKind::kColorWheel,
                                                WidgetKind::kPresetButtons};
  static const std::vector<WidgetKind> position = {
      WidgetKind::kSlider, WidgetKind::kClickOnImage, WidgetKind::kPresetButtons};
  switch (tag) {
    case kContinuous: return continuous;
    case kDiscrete: return discrete;
    case kColor: return color;
    case kPosition: return position;
  }
  return continuous;
}

std::optional<int> fallback_rank(CapabilityTag tag, WidgetKind kind) {
  const auto& list = fallback_list(tag);
  auto it = std::find(list.begin(), list.end(), kind);
  if (it == list.end()) return std::nullopt;
  return static_cast<int>(it - list.begin());
}

std::vector<WidgetKind> candidates_for(TagSet tags) {
  if (tags.empty()) fail(ErrorKind::kValidation, "candidates_for: empty tag set");
  constexpr int kUnranked = 1000;
  std::vector<std::pair<int, WidgetKind>> ranked;
  for (auto kind : kAllWidgets) {
    TagSet shared = capabilities_of(kind) & tags;
    if (shared.empty()) continue;
    int best = kUnranked;
    for (auto t : shared.to_vector())
      if (auto r = fallback_rank(t, kind)) best = std::min(best, *r);
    ranked.emplace_back(best, kind);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return to_string(a.second) < to_string(b.second);
  });
  std::vector<WidgetKind> out;
  out.reserve(ranked.size());
  for (const auto& [rank, kind] : ranked) out.push_back(kind);
  return out;
}

WidgetKind fallback_widget(TagSet tags) {
  // Tag precedence: continuous, position, color, discrete. Every list head has
  // rank 0, so the first present tag decides.
  constexpr std::array<CapabilityTag, 4> precedence = {kContinuous, kPosition, kColor, kDiscrete};
  for (auto t : precedence)
    if (tags.contains(t)) return fallback_list(t).front();
  return fallback_list(kContinuous).front();
}

WidgetKind parse_widget_name(std::string_view raw) {
  const auto& table = alias_table();
  auto it = table.find(normalize(raw));
  if (it == table.end())
    throw Error(ErrorKind::kValidation, "unknown widget name '" + std::string(raw) + "'",
                {std::string(raw)});
  return it->second;
}

nlohmann::json catalog_json() {
  nlohmann::json widgets = nlohmann::json::array();
  for (const auto& k : kKinds) {
    nlohmann::json caps = nlohmann::json::array();
    for (auto t : k.caps.to_vector()) caps.push_back(std::string(to_string(t)));
    widgets.push_back({{"kind", std::string(k.id)},
                       {"display_name", std::string(k.display)},
                       {"capabilities", caps}});
  }
  nlohmann::json fallback = nlohmann::json::object();
  for (auto t : kAllTags) {
    nlohmann::json list = nlohmann::json::array();
    for (auto w : fallback_list(t)) list.push_back(std::string(to_string(w)));
    fallback[std::string(to_string(t))] = list;
  }
  return {{"widgets", widgets}, {"fallback_priority", fallback}};
}

}  // namespace crowdgen
