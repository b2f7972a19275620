#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace crowdgen {

enum class WidgetKind : std::uint8_t {
  kSlider,
  kDropdown,
  kRadioButtons,
  kTextField,
  kPresetButtons,
  kColorWheel,
  kColorPicker,
  kClickOnImage,
};

inline constexpr std::array<WidgetKind, 8> kAllWidgets = {
    WidgetKind::kSlider,        WidgetKind::kDropdown,   WidgetKind::kRadioButtons,
    WidgetKind::kTextField,     WidgetKind::kPresetButtons, WidgetKind::kColorWheel,
    WidgetKind::kColorPicker,   WidgetKind::kClickOnImage,
};

enum class CapabilityTag : std::uint8_t { kContinuous, kDiscrete, kColor, kPosition };

inline constexpr std::array<CapabilityTag, 4> kAllTags = {
    CapabilityTag::kContinuous, CapabilityTag::kDiscrete, CapabilityTag::kColor,
    CapabilityTag::kPosition};

/// Task category tags share the capability vocabulary.
using CategoryTag = CapabilityTag;

/// Small value set over the four capability tags.
class TagSet {
 public:
  constexpr TagSet() = default;
  constexpr TagSet(std::initializer_list<CapabilityTag> tags) {
    for (auto t : tags) insert(t);
  }

  constexpr void insert(CapabilityTag t) { bits_ |= bit(t); }
  constexpr bool contains(CapabilityTag t) const { return (bits_ & bit(t)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool intersects(TagSet o) const { return (bits_ & o.bits_) != 0; }
  constexpr TagSet operator&(TagSet o) const { return from_bits(bits_ & o.bits_); }
  constexpr TagSet operator|(TagSet o) const { return from_bits(bits_ | o.bits_); }
  constexpr TagSet& operator|=(TagSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr bool operator==(const TagSet&) const = default;
  constexpr bool subset_of(TagSet o) const { return (bits_ & ~o.bits_) == 0; }
  int size() const;
  std::vector<CapabilityTag> to_vector() const;

 private:
  static constexpr std::uint8_t bit(CapabilityTag t) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t));
  }
  static constexpr TagSet from_bits(std::uint8_t b) {
    TagSet s;
    s.bits_ = b;
    return s;
  }
  std::uint8_t bits_ = 0;
};

inline constexpr TagSet kAllTagSet{CapabilityTag::kContinuous, CapabilityTag::kDiscrete,
                                   CapabilityTag::kColor, CapabilityTag::kPosition};

std::string_view to_string(WidgetKind kind);
std::string_view to_string(CapabilityTag tag);

/// Exact snake_case identifier lookup (no normalization).
std::optional<WidgetKind> widget_from_id(std::string_view id);
std::optional<CapabilityTag> tag_from_id(std::string_view id);

/// Display name as used in prompts ("Preset Buttons").
std::string_view display_name(WidgetKind kind);

TagSet capabilities_of(WidgetKind kind);

/// Rank of `kind` in the fallback list for `tag`; nullopt when not listed.
std::optional<int> fallback_rank(CapabilityTag tag, WidgetKind kind);
const std::vector<WidgetKind>& fallback_list(CapabilityTag tag);

/// Every kind whose capabilities intersect `tags`, ordered by best fallback
/// rank over the intersecting tags, then by identifier. Throws on empty tags.
std::vector<WidgetKind> candidates_for(TagSet tags);

/// Deterministic pick used when no library evidence is available.
WidgetKind fallback_widget(TagSet tags);

/// Lenient name matching for LLM output: case, spaces, hyphens and
/// underscores are ignored; a fixed alias table covers common phrasings.
/// Throws Error(kValidation) carrying the raw string on no match.
WidgetKind parse_widget_name(std::string_view raw);

nlohmann::json catalog_json();

}  // namespace crowdgen
