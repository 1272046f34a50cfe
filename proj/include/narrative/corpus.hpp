#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "narrative/error.hpp"
#include "narrative/llm/client.hpp"

namespace narrative::corpus {

inline constexpr std::size_t kMinSentences = 5;

struct SentenceRecord {
  std::size_t index = 0;  // 1-based
  std::string text;
  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct Narrative {
  std::string id;
  std::string title;
  std::string genre;
  /// "human" or the name of the model that wrote it.
  std::string source;
  std::vector<SentenceRecord> sentences;

  std::size_t sentence_count() const { return sentences.size(); }
  std::vector<std::string> texts() const;

  /// Checks indices 1..N, non-empty single-line text and N >= kMinSentences.
  /// Throws InputError describing the first violation.
  void validate() const;
};

/// Builds a narrative from already-split sentence strings. Each string is
/// whitespace-normalised; indices are assigned 1..N.
Narrative make_narrative(std::string id, std::string title, std::string genre, std::string source,
                         const std::vector<std::string>& sentences);

/// Rule-based segmentation: splits after . ! ? (plus closing quotes and
/// brackets) when followed by whitespace and a non-lowercase character, except
/// after known abbreviations and runs of initials leading into a name.
/// Throws InputError on empty or all-whitespace input.
std::vector<SentenceRecord> split_sentences(std::string_view raw_text);

/// Immutable, id-indexed collection in ingestion order.
class CorpusStore {
 public:
  CorpusStore() = default;
  /// Validates every narrative; throws ConflictError on duplicate ids.
  explicit CorpusStore(std::vector<Narrative> narratives);

  std::size_t size() const { return narratives_.size(); }
  bool empty() const { return narratives_.empty(); }
  const Narrative* find(const std::string& id) const;
  /// Throws InputError when absent.
  const Narrative& at(const std::string& id) const;

  auto begin() const { return narratives_.begin(); }
  auto end() const { return narratives_.end(); }
  const std::vector<Narrative>& narratives() const { return narratives_; }

 private:
  std::vector<Narrative> narratives_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One JSON object per line: {"id","title","genre","source","sentences": [...]}
/// or the same with "text" (segmented on load). Blank lines are skipped.
/// Malformed lines raise ParseError carrying the line number; repeated ids
/// raise ConflictError.
CorpusStore ingest_corpus(std::istream& in);
CorpusStore load_corpus(const std::string& path);

/// Writes the pre-split form, one narrative per line.
void write_corpus(std::ostream& out, const CorpusStore& store);
nlohmann::json to_json(const Narrative& n);

// ---------------------------------------------------------------------------
// Popularity filtering
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultPopularityThreshold = 50'000;

struct PageMetadata {
  std::string narrative_id;
  std::uint64_t page_length_bytes = 0;
};

/// CSV with header narrative_id,page_length_bytes.
std::vector<PageMetadata> read_metadata_csv(std::istream& in);

struct PopularityPartition {
  std::vector<std::string> kept;     // sorted
  std::vector<std::string> dropped;  // sorted
};

/// Keeps pages strictly shorter than `threshold_bytes` (long pages mark
/// well-known titles). Throws InputError when the threshold is 0.
PopularityPartition popularity_filter(const std::vector<PageMetadata>& metadata,
                                      std::uint64_t threshold_bytes);

// ---------------------------------------------------------------------------
// Identifier rephrasing
// ---------------------------------------------------------------------------

struct Premise {
  std::string title;
  std::string initial_setting;
  std::string genre;

  /// Throws InputError if any field is empty.
  void validate() const;
};

/// Title and genre plus the first `setting_sentences` sentences as the setting.
Premise premise_from(const Narrative& n, std::size_t setting_sentences = 2);

class RephraseError : public Error {
 public:
  RephraseError(const std::string& narrative_id, const std::string& what)
      : Error("rephrase " + narrative_id + ": " + what), narrative_id_(narrative_id) {}
  const std::string& narrative_id() const { return narrative_id_; }

 private:
  std::string narrative_id_;
};

struct RephraseResult {
  Narrative narrative;
  std::map<std::string, std::string> substitutions;
  std::vector<llm::ChatExchange> exchanges;
};

/// Replaces whole-word occurrences of each key (longest key first, single
/// left-to-right pass) in the title and every sentence. Sentences without a
/// match are returned verbatim. Throws RephraseError if a sentence would
/// become empty.
Narrative apply_substitutions(const Narrative& n, const std::map<std::string, std::string>& map);

/// Asks the model for an identifier substitution map and applies it.
RephraseResult rephrase_identifiers(const Narrative& n, llm::ChatClient& client, int repairs = 1);

}  // namespace narrative::corpus
