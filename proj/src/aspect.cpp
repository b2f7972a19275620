#include "crowdgen/aspect.hpp"

namespace crowdgen {

std::string_view to_string(Aspect a) {
  switch (a) {
    case Aspect::kPredictability: return "predictability";
    case Aspect::kEfficiency: return "efficiency";
    case Aspect::kExplorability: return "explorability";
  }
  return "?";
}

std::optional<Aspect> aspect_from_id(std::string_view id) {
  for (auto a : kAllAspects)
    if (to_string(a) == id) return a;
  return std::nullopt;
}

std::string_view display_name(Aspect a) {
  switch (a) {
    case Aspect::kPredictability: return "Predictability";
    case Aspect::kEfficiency: return "Efficiency";
    case Aspect::kExplorability: return "Explorability";
  }
  return "?";
}

}  // namespace crowdgen
