#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "narrative/discourse.hpp"
#include "narrative/llm/types.hpp"

namespace narrative::llm {

/// Extracts the JSON object from a model answer: the whole text, a ```json
/// fenced block, or the span between the first '{' and the last '}'.
std::optional<json> extract_json_object(std::string_view text);

/// {"arc": name} first; otherwise the single arc name mentioned in the text.
/// Throws ParseError on zero or several candidates.
discourse::ArcType parse_arc(std::string_view text);

/// {"tp1": int, ..., "tp5": int}, optionally nested under "turning_points".
/// Positions must be integers in [1, sentence_count].
discourse::TurningPointSet parse_tps(std::string_view text, std::size_t sentence_count);

/// Canonical answer form accepted by parse_tps.
std::string format_tps(const discourse::TurningPointSet& tps);

/// Exactly three lowercase single-word adjectives from {"adjectives": [...]}
/// or a comma-separated list.
std::array<std::string, 3> parse_adjectives(std::string_view text);

/// {"protagonist": name}, falling back to the trimmed first line.
std::string parse_protagonist(std::string_view text);

/// {"substitutions": {original: replacement}}.
std::map<std::string, std::string> parse_substitutions(std::string_view text);

/// Non-empty list of strings under `field` (e.g. "outline", "story").
std::vector<std::string> parse_string_list(std::string_view text, const std::string& field);

}  // namespace narrative::llm
