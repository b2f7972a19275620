#include <doctest.h>

#include <algorithm>
#include <set>

#include "crowdgen/error.hpp"
#include "crowdgen/widget_catalog.hpp"

using namespace crowdgen;
using enum CapabilityTag;

TEST_SUITE("catalog") {

TEST_CASE("capability mapping") {
  CHECK(capabilities_of(WidgetKind::kSlider) == TagSet{kContinuous, kPosition});
  CHECK(capabilities_of(WidgetKind::kColorPicker) == TagSet{kColor});
  CHECK(capabilities_of(WidgetKind::kPresetButtons) == TagSet{kDiscrete, kColor, kPosition});
  CHECK(capabilities_of(WidgetKind::kClickOnImage) == TagSet{kPosition});
  TagSet all;
  for (auto w : kAllWidgets) {
    CHECK_FALSE(capabilities_of(w).empty());
    all |= capabilities_of(w);
  }
  CHECK(all == kAllTagSet);
}

TEST_CASE("fallback ranks are unique per tag") {
  for (auto t : kAllTags) {
    const auto& list = fallback_list(t);
    std::set<WidgetKind> seen(list.begin(), list.end());
    CHECK(seen.size() == list.size());
    for (auto w : list) CHECK(capabilities_of(w).contains(t));
  }
}

TEST_CASE("candidates_for") {
  const auto color = candidates_for(TagSet{kColor});
  CHECK(color == std::vector<WidgetKind>{WidgetKind::kColorPicker, WidgetKind::kColorWheel,
                                         WidgetKind::kPresetButtons});
  CHECK(candidates_for(kAllTagSet).size() == 8);
  const auto pos = candidates_for(TagSet{kPosition});
  CHECK(std::find(pos.begin(), pos.end(), WidgetKind::kClickOnImage) != pos.end());
  CHECK_THROWS_AS(candidates_for(TagSet{}), Error);
}

TEST_CASE("candidates_for is monotone in the tag set") {
  for (int a = 1; a < 16; ++a) {
    for (int b = 1; b < 16; ++b) {
      if ((a & b) != a) continue;
      TagSet sa, sb;
      for (int i = 0; i < 4; ++i) {
        if (a & (1 << i)) sa.insert(kAllTags[i]);
        if (b & (1 << i)) sb.insert(kAllTags[i]);
      }
      auto ra = candidates_for(sa), rb = candidates_for(sb);
      std::set<WidgetKind> big(rb.begin(), rb.end());
      for (auto w : ra) CHECK(big.count(w) == 1);
    }
  }
}

TEST_CASE("fallback widget precedence") {
  CHECK(fallback_widget(TagSet{kContinuous}) == WidgetKind::kSlider);
  CHECK(fallback_widget(TagSet{kContinuous, kDiscrete}) == WidgetKind::kSlider);
  CHECK(fallback_widget(TagSet{kPosition, kDiscrete}) == WidgetKind::kSlider);
  CHECK(fallback_widget(TagSet{kColor}) == WidgetKind::kColorPicker);
  CHECK(fallback_widget(TagSet{kDiscrete}) == WidgetKind::kPresetButtons);
}

TEST_CASE("parse_widget_name") {
  CHECK(parse_widget_name("Preset Buttons") == WidgetKind::kPresetButtons);
  CHECK(parse_widget_name("Color Wheel") == WidgetKind::kColorWheel);
  CHECK(parse_widget_name("click on image") == WidgetKind::kClickOnImage);
  CHECK(parse_widget_name("buttons with preview overlays") == WidgetKind::kPresetButtons);
  CHECK(parse_widget_name("  radio-buttons ") == WidgetKind::kRadioButtons);
  for (auto w : kAllWidgets) {
    CHECK(parse_widget_name(to_string(w)) == w);
    CHECK(parse_widget_name(display_name(w)) == w);
  }
  try {
    parse_widget_name("joystick");
    FAIL("expected a no-match error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
    REQUIRE(e.details().size() == 1);
    CHECK(e.details()[0] == "joystick");
  }
}

TEST_CASE("catalog json lists every kind") {
  const auto doc = catalog_json();
  REQUIRE(doc["widgets"].size() == 8);
  CHECK(doc["widgets"][0]["kind"] == "slider");
  CHECK(doc["fallback_priority"]["color"][0] == "color_picker");
}

}
