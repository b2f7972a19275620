#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace crowdgen {

/// Preference aspects raters judge widgets on.
enum class Aspect : std::uint8_t { kPredictability, kEfficiency, kExplorability };

inline constexpr std::array<Aspect, 3> kAllAspects = {
    Aspect::kPredictability, Aspect::kEfficiency, Aspect::kExplorability};

std::string_view to_string(Aspect a);
std::optional<Aspect> aspect_from_id(std::string_view id);

/// Capitalized label ("Predictability").
std::string_view display_name(Aspect a);

}  // namespace crowdgen
