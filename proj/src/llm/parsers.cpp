#include "narrative/llm/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "narrative/text.hpp"

namespace narrative::llm {

using discourse::ArcType;

std::optional<json> extract_json_object(std::string_view text) {
  auto try_parse = [](std::string_view s) -> std::optional<json> {
    json j = json::parse(s.begin(), s.end(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
  };
  if (auto j = try_parse(text)) return j;

  if (auto fence = text.find("```"); fence != std::string_view::npos) {
    auto body = text.find('\n', fence);
    auto close = body == std::string_view::npos ? body : text.find("```", body);
    if (close != std::string_view::npos) {
      if (auto j = try_parse(text.substr(body + 1, close - body - 1))) return j;
    }
  }

  const auto first = text.find('{');
  const auto last = text.rfind('}');
  if (first != std::string_view::npos && last != std::string_view::npos && last > first) {
    if (auto j = try_parse(text.substr(first, last - first + 1))) return j;
  }
  return std::nullopt;
}

namespace {

struct ArcPattern {
  ArcType arc;
  std::regex re;
};

const std::vector<ArcPattern>& arc_patterns() {
  static const std::vector<ArcPattern> patterns = [] {
    const auto flags = std::regex::ECMAScript | std::regex::icase;
    const std::string sep = R"([\s_-]*)";
    const std::string article = "(?:(?:a|the)" + sep + ")?";
    const std::string hole = "man" + sep + "in" + sep + article + "hole";
    return std::vector<ArcPattern>{
        {ArcType::DoubleManInHole, std::regex("\\bdouble" + sep + hole + "\\b", flags)},
        {ArcType::ManInHole, std::regex("\\b" + hole + "\\b", flags)},
        {ArcType::RagsToRiches, std::regex("\\brags" + sep + "to" + sep + "riches\\b", flags)},
        {ArcType::RichesToRags, std::regex("\\briches" + sep + "to" + sep + "rags\\b", flags)},
        {ArcType::Icarus, std::regex(R"(\bicarus\b)", flags)},
        {ArcType::Cinderella, std::regex(R"(\bcinderella\b)", flags)},
        {ArcType::Oedipus, std::regex(R"(\boedipus\b)", flags)},
    };
  }();
  return patterns;
}

struct Mention {
  ArcType arc;
  std::size_t begin;
  std::size_t end;
};

ArcType arc_from_mentions(std::string_view text) {
  const std::string s(text);
  std::vector<Mention> mentions;
  for (const auto& p : arc_patterns()) {
    for (auto it = std::sregex_iterator(s.begin(), s.end(), p.re); it != std::sregex_iterator(); ++it) {
      const auto b = static_cast<std::size_t>(it->position());
      mentions.push_back({p.arc, b, b + static_cast<std::size_t>(it->length())});
    }
  }
  // "Man in Hole" inside "Double Man in Hole" is not a separate mention.
  std::set<ArcType> arcs;
  for (const auto& m : mentions) {
    const bool nested = std::any_of(mentions.begin(), mentions.end(), [&](const Mention& o) {
      return o.arc != m.arc && o.begin <= m.begin && o.end >= m.end &&
             (o.end - o.begin) > (m.end - m.begin);
    });
    if (!nested) arcs.insert(m.arc);
  }
  if (arcs.empty()) throw ParseError("no story arc label found in response");
  if (arcs.size() > 1) throw ParseError("ambiguous response: several story arc labels found");
  return *arcs.begin();
}

}  // namespace

ArcType parse_arc(std::string_view text) {
  if (auto j = extract_json_object(text); j && j->contains("arc")) {
    const auto& v = (*j)["arc"];
    if (!v.is_string()) throw ParseError("\"arc\" must be a string");
    return discourse::parse_arc_name(v.get<std::string>());
  }
  return arc_from_mentions(text);
}

discourse::TurningPointSet parse_tps(std::string_view text, std::size_t sentence_count) {
  auto j = extract_json_object(text);
  if (!j) throw ParseError("no JSON object with turning points found");
  const json* obj = &*j;
  if (j->contains("turning_points") && (*j)["turning_points"].is_object())
    obj = &(*j)["turning_points"];

  std::array<int, 5> positions{};
  for (auto tp : discourse::kAllTurningPoints) {
    const std::string label(discourse::tp_label(tp));
    const std::string key = text::to_lower(label);
    const json* v = nullptr;
    if (obj->contains(key)) v = &(*obj)[key];
    else if (obj->contains(label)) v = &(*obj)[label];
    if (!v) throw ParseError("missing " + key);
    if (!v->is_number_integer()) throw ParseError(key + " is not an integer");
    const auto p = v->get<long long>();
    if (p < 1 || static_cast<unsigned long long>(p) > sentence_count) {
      throw ParseError(key + " position " + std::to_string(p) + " outside [1, " +
                       std::to_string(sentence_count) + "]");
    }
    positions[discourse::tp_index(tp)] = static_cast<int>(p);
  }
  return discourse::TurningPointSet(positions);
}

std::string format_tps(const discourse::TurningPointSet& tps) {
  json j = json::object();
  for (auto tp : discourse::kAllTurningPoints)
    j[text::to_lower(discourse::tp_label(tp))] = tps[tp];
  return j.dump();
}

namespace {

std::string normalize_adjective(std::string word) {
  word = text::to_lower(text::trim(word));
  while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.back())) && word.back() != '-')
    word.pop_back();
  while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.front()))) word.erase(0, 1);
  if (word.empty()) throw ParseError("empty adjective");
  if (std::any_of(word.begin(), word.end(), [](unsigned char c) { return std::isspace(c); }))
    throw ParseError("adjective '" + word + "' is not a single word");
  return word;
}

}  // namespace

std::array<std::string, 3> parse_adjectives(std::string_view text) {
  std::vector<std::string> words;
  if (auto j = extract_json_object(text); j && j->contains("adjectives")) {
    const auto& arr = (*j)["adjectives"];
    if (!arr.is_array()) throw ParseError("\"adjectives\" must be an array");
    for (const auto& v : arr) {
      if (!v.is_string()) throw ParseError("adjective entries must be strings");
      words.push_back(v.get<std::string>());
    }
  } else {
    std::string flat = text::collapse_whitespace(text);
    for (auto& part : text::split(flat, ','))
      if (!text::trim(part).empty()) words.push_back(part);
  }
  if (words.size() != 3)
    throw ParseError("expected 3 adjectives, got " + std::to_string(words.size()));
  return {normalize_adjective(words[0]), normalize_adjective(words[1]), normalize_adjective(words[2])};
}

std::string parse_protagonist(std::string_view text) {
  if (auto j = extract_json_object(text); j && j->contains("protagonist")) {
    const auto& v = (*j)["protagonist"];
    if (!v.is_string() || text::trim(v.get<std::string>()).empty())
      throw ParseError("\"protagonist\" must be a non-empty string");
    return text::trim(v.get<std::string>());
  }
  const std::string first = text::trim(text::split(text::trim(text), '\n').front());
  if (first.empty() || first.front() == '{') throw ParseError("no protagonist found");
  return first;
}

std::map<std::string, std::string> parse_substitutions(std::string_view text) {
  auto j = extract_json_object(text);
  if (!j || !j->contains("substitutions") || !(*j)["substitutions"].is_object())
    throw ParseError("expected {\"substitutions\": {...}}");
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : (*j)["substitutions"].items()) {
    if (!v.is_string()) throw ParseError("substitution for '" + k + "' is not a string");
    if (text::trim(k).empty()) throw ParseError("empty identifier in substitutions");
    out[k] = v.get<std::string>();
  }
  return out;
}

std::vector<std::string> parse_string_list(std::string_view text, const std::string& field) {
  auto j = extract_json_object(text);
  if (!j || !j->contains(field) || !(*j)[field].is_array())
    throw ParseError("expected {\"" + field + "\": [...]}");
  std::vector<std::string> out;
  for (const auto& v : (*j)[field]) {
    if (!v.is_string()) throw ParseError("\"" + field + "\" entries must be strings");
    std::string s = text::collapse_whitespace(v.get<std::string>());
    if (!s.empty()) out.push_back(std::move(s));
  }
  if (out.empty()) throw ParseError("\"" + field + "\" is empty");
  return out;
}

}  // namespace narrative::llm
