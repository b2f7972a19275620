#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crowdgen/aspect.hpp"
#include "crowdgen/widget_catalog.hpp"

namespace crowdgen {

struct PreferenceResponse {
  std::string rater_id;
  WidgetKind widget;
  std::string reason;

  bool operator==(const PreferenceResponse&) const = default;
};

struct TaskRecord {
  std::string name;
  std::string description;
  TagSet tags;
  std::map<Aspect, std::vector<PreferenceResponse>> responses;

  bool operator==(const TaskRecord&) const = default;
};

struct PreferenceLibrary {
  std::string version;
  std::vector<TaskRecord> tasks;

  const TaskRecord* find(std::string_view name) const;
  std::size_t response_count() const;
  bool empty() const { return tasks.empty(); }

  bool operator==(const PreferenceLibrary&) const = default;
};

/// withlib(n): n responses per (task, aspect); withoutlib: no library.
class LibraryMode {
 public:
  static LibraryMode withlib(int n);
  static LibraryMode withoutlib() { return LibraryMode(0); }

  /// Accepts "withlib<n>", "withlib(<n>)" and "withoutlib".
  static LibraryMode parse(std::string_view text);

  bool uses_library() const { return n_ > 0; }
  /// Responses per aspect; 0 for withoutlib.
  int responses() const { return n_; }
  std::string to_string() const;

  auto operator<=>(const LibraryMode&) const = default;

 private:
  explicit LibraryMode(int n) : n_(n) {}
  int n_;
};

struct FrequencyTable {
  std::map<WidgetKind, int> counts;
  int total = 0;

  int count(WidgetKind w) const;
  double share(WidgetKind w) const;
  /// Highest count, ties broken by catalog order.
  std::optional<WidgetKind> argmax() const;
};

/// Structural validation of a library document. Returns one "path: message"
/// entry per violation; empty means valid.
std::vector<std::string> validate_library_json(const nlohmann::json& doc);

/// Validates, then builds. Throws Error(kValidation) with every violation.
PreferenceLibrary parse_library(const nlohmann::json& doc);
PreferenceLibrary load_library(std::istream& in);
PreferenceLibrary load_library_file(const std::filesystem::path& path);

/// Library file representation (inverse of parse_library).
nlohmann::json to_json(const PreferenceLibrary& lib);

/// Library with no tasks; the withoutlib constant.
PreferenceLibrary empty_library();

/// Keeps the first n responses of each list under a seeded shuffle of all
/// rater ids. The shuffle is shared by every (task, aspect), so for a fixed
/// seed smaller subsets nest inside larger ones. Original list order is kept.
PreferenceLibrary subset_library(const PreferenceLibrary& lib, LibraryMode mode,
                                 std::uint64_t seed);

FrequencyTable aggregate_frequencies(const TaskRecord& task, Aspect aspect);

/// Prompt-facing view: descriptions, per-aspect frequency tables and reason
/// lists. Key order is fixed so the dump is byte-stable.
nlohmann::ordered_json serialize_for_prompt(const PreferenceLibrary& lib);

/// Appends one response after re-validating it against the library.
/// Throws Error(kConflict) when the append would violate an invariant.
void append_response(PreferenceLibrary& lib, std::string_view task, Aspect aspect,
                     PreferenceResponse response);

}  // namespace crowdgen
