#include "narrative/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>

#include "narrative/llm/parsers.hpp"
#include "narrative/llm/prompts.hpp"
#include "narrative/text.hpp"

namespace narrative::corpus {

using nlohmann::json;

std::vector<std::string> Narrative::texts() const {
  std::vector<std::string> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.text);
  return out;
}

void Narrative::validate() const {
  if (id.empty()) throw InputError("narrative id is empty");
  if (sentences.size() < kMinSentences) {
    throw InputError("narrative " + id + " has " + std::to_string(sentences.size()) +
                     " sentences; at least " + std::to_string(kMinSentences) + " required");
  }
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    if (s.index != i + 1)
      throw InputError("narrative " + id + ": sentence indices are not contiguous at " +
                       std::to_string(i + 1));
    if (s.text.empty()) throw InputError("narrative " + id + ": sentence " + std::to_string(i + 1) + " is empty");
    if (s.text.find_first_of("\r\n") != std::string::npos)
      throw InputError("narrative " + id + ": sentence " + std::to_string(i + 1) + " contains a newline");
  }
}

Narrative make_narrative(std::string id, std::string title, std::string genre, std::string source,
                         const std::vector<std::string>& sentences) {
  Narrative n{std::move(id), std::move(title), std::move(genre), std::move(source), {}};
  n.sentences.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i)
    n.sentences.push_back({i + 1, text::collapse_whitespace(sentences[i])});
  return n;
}

// ---------------------------------------------------------------------------
// Sentence segmentation

namespace {

const std::set<std::string>& abbreviations() {
  static const std::set<std::string> abbr = {
      "mr",  "mrs", "ms",   "dr",  "prof", "sr",  "jr",   "st",    "mt",   "ft",   "lt",
      "col", "gen", "capt", "cpt", "sgt",  "rev", "hon",  "gov",   "sen",  "rep",  "pres",
      "vs",  "cf",  "e.g",  "i.e", "approx", "dept", "est", "fig", "jan",  "feb",  "aug",
      "sept", "oct", "nov", "dec", "a.m", "p.m",  "u.s",  "u.k",   "corp", "bros", "messrs",
  };
  return abbr;
}

// Capitalised words that commonly open a sentence; an initial followed by one
// of these is treated as sentence-final ("Plan A. Then ...").
const std::set<std::string>& sentence_openers() {
  static const std::set<std::string> words = {
      "The",  "Then", "He",   "She",   "They",  "It",    "We",      "I",       "But",
      "And",  "When", "After", "As",   "In",    "On",    "At",      "His",     "Her",
      "Their", "This", "That", "There", "Meanwhile", "Later", "However", "Soon", "Finally",
      "While", "With", "Once", "Now",  "So",    "A",     "An",      "Eventually", "Suddenly",
  };
  return words;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

// Length of a closing quote/bracket at `pos`, 0 if none. Handles UTF-8 ’ and ”.
std::size_t closer_length(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  const char c = s[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  if (pos + 2 < s.size() && static_cast<unsigned char>(c) == 0xE2 &&
      static_cast<unsigned char>(s[pos + 1]) == 0x80) {
    const auto third = static_cast<unsigned char>(s[pos + 2]);
    if (third == 0x99 || third == 0x9D) return 3;
  }
  return 0;
}

// Whitespace-delimited token ending just before `dot` (exclusive), with
// leading punctuation stripped.
std::string_view token_before(std::string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(s[b - 1])) --b;
  while (b < dot && !is_alpha(s[b]) && !std::isdigit(static_cast<unsigned char>(s[b]))) ++b;
  return s.substr(b, dot - b);
}

std::string_view next_token(std::string_view s, std::size_t pos) {
  while (pos < s.size() && is_space(s[pos])) ++pos;
  std::size_t e = pos;
  while (e < s.size() && !is_space(s[e])) ++e;
  return s.substr(pos, e - pos);
}

bool is_initial(std::string_view token) {
  return token.size() == 2 && is_upper(token[0]) && token[1] == '.';
}

bool is_name_word(std::string_view token) {
  std::size_t n = 0;
  while (n < token.size() && (is_alpha(token[n]) || token[n] == '\'' || token[n] == '-')) ++n;
  const std::string_view word = token.substr(0, n);
  return word.size() >= 2 && is_upper(word[0]) && !sentence_openers().count(std::string(word));
}

// True if a run of initials starting at `pos` ends in a capitalised name.
bool initials_lead_to_name(std::string_view s, std::size_t pos) {
  for (;;) {
    const std::string_view tok = next_token(s, pos);
    if (tok.empty()) return false;
    if (is_initial(tok)) {
      pos = static_cast<std::size_t>(tok.data() + tok.size() - s.data());
      continue;
    }
    return is_name_word(tok);
  }
}

bool suppresses_boundary(std::string_view s, std::size_t dot, std::size_t after) {
  const std::string_view tok = token_before(s, dot);
  if (tok.empty()) return false;
  const std::string lower = text::to_lower(tok);
  if (abbreviations().count(lower)) return true;
  // Dotted acronyms such as "J.R.R" or "U.N".
  if (lower.size() >= 3) {
    bool dotted = true;
    for (std::size_t i = 0; i < lower.size(); ++i)
      dotted = dotted && ((i % 2 == 0) ? is_alpha(lower[i]) : lower[i] == '.');
    if (dotted && lower.size() % 2 == 1) return true;
  }
  // A single capital initial followed by more initials or a surname.
  if (tok.size() == 1 && is_upper(tok[0])) return initials_lead_to_name(s, after);
  return false;
}

}  // namespace

std::vector<SentenceRecord> split_sentences(std::string_view raw) {
  const std::string normalized = text::collapse_whitespace(raw);
  if (normalized.empty()) throw InputError("cannot split empty text");
  const std::string_view s = normalized;

  std::vector<SentenceRecord> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < s.size() && (s[end] == '.' || s[end] == '!' || s[end] == '?')) ++end;
    while (std::size_t len = closer_length(s, end)) end += len;

    const bool at_end = end >= s.size();
    bool boundary = at_end || is_space(s[end]);
    if (boundary && !at_end) {
      const std::string_view next = next_token(s, end);
      if (!next.empty() && is_lower(next[0])) boundary = false;
      else if (c == '.' && suppresses_boundary(s, i, end)) boundary = false;
    }
    if (boundary) {
      std::string sentence = text::trim(s.substr(start, end - start));
      if (!sentence.empty()) out.push_back({out.size() + 1, std::move(sentence)});
      start = end;
    }
    i = end;
  }
  if (start < s.size()) {
    std::string tail = text::trim(s.substr(start));
    if (!tail.empty()) out.push_back({out.size() + 1, std::move(tail)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CorpusStore

CorpusStore::CorpusStore(std::vector<Narrative> narratives) : narratives_(std::move(narratives)) {
  for (std::size_t i = 0; i < narratives_.size(); ++i) {
    narratives_[i].validate();
    if (!index_.emplace(narratives_[i].id, i).second)
      throw ConflictError("duplicate narrative id '" + narratives_[i].id + "'");
  }
}

const Narrative* CorpusStore::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &narratives_[it->second];
}

const Narrative& CorpusStore::at(const std::string& id) const {
  if (const auto* n = find(id)) return *n;
  throw InputError("narrative '" + id + "' not in corpus");
}

namespace {

std::string required_string(const json& j, const char* field, std::size_t line) {
  if (!j.contains(field)) throw ParseError(std::string("missing field \"") + field + "\"", line);
  if (!j[field].is_string()) throw ParseError(std::string("field \"") + field + "\" must be a string", line);
  return j[field].get<std::string>();
}

Narrative parse_record(const std::string& line_text, std::size_t line) {
  json j = json::parse(line_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("not a JSON object", line);

  Narrative n;
  n.id = required_string(j, "id", line);
  if (n.id.empty()) throw ParseError("empty id", line);
  n.title = required_string(j, "title", line);
  n.genre = required_string(j, "genre", line);
  n.source = required_string(j, "source", line);

  const bool has_sentences = j.contains("sentences");
  const bool has_text = j.contains("text");
  if (has_sentences == has_text)
    throw ParseError("record needs exactly one of \"sentences\" or \"text\"", line);

  if (has_sentences) {
    if (!j["sentences"].is_array()) throw ParseError("\"sentences\" must be an array", line);
    std::size_t idx = 0;
    for (const auto& s : j["sentences"]) {
      ++idx;
      if (!s.is_string()) throw ParseError("sentence " + std::to_string(idx) + " is not a string", line);
      std::string t = text::collapse_whitespace(s.get<std::string>());
      if (t.empty()) throw ParseError("sentence " + std::to_string(idx) + " is empty", line);
      n.sentences.push_back({idx, std::move(t)});
    }
  } else {
    const auto raw = required_string(j, "text", line);
    try {
      n.sentences = split_sentences(raw);
    } catch (const InputError& e) {
      throw ParseError(e.what(), line);
    }
  }
  try {
    n.validate();
  } catch (const InputError& e) {
    throw ParseError(e.what(), line);
  }
  return n;
}

}  // namespace

CorpusStore ingest_corpus(std::istream& in) {
  std::vector<Narrative> narratives;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    Narrative n = parse_record(line, line_no);
    if (!seen.insert(n.id).second)
      throw ConflictError("line " + std::to_string(line_no) + ": duplicate narrative id '" + n.id + "'");
    narratives.push_back(std::move(n));
  }
  return CorpusStore(std::move(narratives));
}

CorpusStore load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus " + path);
  return ingest_corpus(in);
}

json to_json(const Narrative& n) {
  return {{"id", n.id}, {"title", n.title}, {"genre", n.genre}, {"source", n.source}, {"sentences", n.texts()}};
}

void write_corpus(std::ostream& out, const CorpusStore& store) {
  for (const auto& n : store) out << to_json(n).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Popularity filter

std::vector<PageMetadata> read_metadata_csv(std::istream& in) {
  const auto table = text::read_csv(in);
  const auto id_col = table.column("narrative_id");
  const auto len_col = table.column("page_length_bytes");
  std::vector<PageMetadata> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string& v = row[len_col];
    std::uint64_t bytes = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), bytes);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw ParseError("page_length_bytes '" + v + "' is not a non-negative integer", table.lines[r]);
    out.push_back({row[id_col], bytes});
  }
  return out;
}

PopularityPartition popularity_filter(const std::vector<PageMetadata>& metadata,
                                      std::uint64_t threshold_bytes) {
  if (threshold_bytes == 0) throw InputError("popularity threshold must be > 0");
  PopularityPartition p;
  for (const auto& m : metadata)
    (m.page_length_bytes < threshold_bytes ? p.kept : p.dropped).push_back(m.narrative_id);
  for (auto* v : {&p.kept, &p.dropped}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Rephrasing

void Premise::validate() const {
  if (text::trim(title).empty()) throw InputError("premise title is empty");
  if (text::trim(initial_setting).empty()) throw InputError("premise initial setting is empty");
  if (text::trim(genre).empty()) throw InputError("premise genre is empty");
}

Premise premise_from(const Narrative& n, std::size_t setting_sentences) {
  std::vector<std::string> head;
  for (std::size_t i = 0; i < std::min(setting_sentences, n.sentences.size()); ++i)
    head.push_back(n.sentences[i].text);
  Premise p{n.title, text::join(head, " "), n.genre};
  p.validate();
  return p;
}

namespace {

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' ||
         (static_cast<unsigned char>(c) & 0x80) != 0;
}

std::string substitute(const std::string& s, const std::vector<std::pair<std::string, std::string>>& keys,
                       bool& changed) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    bool matched = false;
    if (i == 0 || !word_char(s[i - 1])) {
      for (const auto& [from, to] : keys) {
        if (s.compare(i, from.size(), from) != 0) continue;
        const std::size_t e = i + from.size();
        if (e < s.size() && word_char(s[e]) && word_char(from.back())) continue;
        out += to;
        i = e;
        matched = changed = true;
        break;
      }
    }
    if (!matched) out.push_back(s[i++]);
  }
  return out;
}

}  // namespace

Narrative apply_substitutions(const Narrative& n, const std::map<std::string, std::string>& map) {
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& [from, to] : map) {
    if (from.empty()) throw RephraseError(n.id, "empty identifier in substitution map");
    keys.emplace_back(from, to);
  }
  std::stable_sort(keys.begin(), keys.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

  Narrative out = n;
  bool title_changed = false;
  out.title = substitute(n.title, keys, title_changed);
  for (auto& s : out.sentences) {
    bool changed = false;
    std::string replaced = substitute(s.text, keys, changed);
    if (!changed) continue;
    replaced = text::collapse_whitespace(replaced);
    if (replaced.empty()) {
      throw RephraseError(n.id, "substitution empties sentence " + std::to_string(s.index) +
                                    " (sentence count would change)");
    }
    s.text = std::move(replaced);
  }
  if (out.sentences.size() != n.sentences.size())
    throw RephraseError(n.id, "sentence count changed");
  return out;
}

RephraseResult rephrase_identifiers(const Narrative& n, llm::ChatClient& client, int repairs) {
  const auto sentences = n.texts();
  auto result = llm::complete_structured<std::map<std::string, std::string>>(
      client, llm::identifier_rephrase_prompt(n.title, sentences),
      [](const std::string& text) { return llm::parse_substitutions(text); },
      llm::TaskKind::Comprehension, repairs);
  if (!result.value) throw RephraseError(n.id, "unparseable substitution map: " + result.error);
  RephraseResult out{apply_substitutions(n, *result.value), std::move(*result.value),
                     std::move(result.exchanges)};
  return out;
}

}  // namespace narrative::corpus
