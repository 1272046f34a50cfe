#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "narrative/discourse.hpp"
#include "narrative/llm/types.hpp"

namespace narrative::llm {

enum class TemplateName {
  ProtagonistId,
  EmotionAdjectives,
  ArcIdentify,
  ArcIdentifyWithTps,
  TpIdentify,
  TpIdentifyWithArc,
  OutlineOnly,
  ExpandOutline,
  SelfTpOutline,
  HumanTpOutline,
  ArcEnhanced,
  IdentifierRephrase,
};

std::string_view template_key(TemplateName name);
std::optional<TemplateName> template_from_key(std::string_view key);

/// A system message plus a user body with `{{placeholder}}` slots.
struct PromptTemplate {
  TemplateName name;
  std::string system;
  std::string body;

  /// Placeholder names in order of first appearance.
  std::vector<std::string> placeholders() const;
};

const PromptTemplate& get_template(TemplateName name);

class RenderError : public Error {
 public:
  using Error::Error;
};

using Bindings = std::map<std::string, std::string>;

/// Substitutes every placeholder; throws RenderError naming the first unbound one.
/// Extra bindings are ignored.
Messages render(const PromptTemplate& tmpl, const Bindings& bindings);

// ---------------------------------------------------------------------------
// Binding helpers. Each renders one fragment the templates share.
// ---------------------------------------------------------------------------

/// One line per sentence: "[i] text", 1-based.
std::string indexed_narrative(std::span<const std::string> sentences);
/// "- Rags to Riches: <description>" for every arc.
std::string arc_definitions();
/// "TP1 - Opportunity: <description>" lines for the given turning points.
std::string tp_definitions(std::span<const discourse::TurningPoint> tps);
/// Gold sentences labelled TP1..TP5 with their type definitions.
std::string tp_evidence(std::span<const std::string> sentences,
                        const discourse::TurningPointSet& tps);

/// Segment count, segment list and start/end fortune for an arc.
Bindings arc_shape_bindings(discourse::ArcType arc);

// ---------------------------------------------------------------------------
// Task prompts
// ---------------------------------------------------------------------------

Messages arc_identify_prompt(std::span<const std::string> sentences);
Messages arc_identify_with_tps_prompt(std::span<const std::string> sentences,
                                      const discourse::TurningPointSet& gold_tps);
Messages tp_identify_prompt(std::span<const std::string> sentences);
Messages tp_identify_with_arc_prompt(std::span<const std::string> sentences,
                                     discourse::ArcType gold_arc);
Messages protagonist_prompt(std::span<const std::string> sentences);
Messages emotion_adjectives_prompt(std::span<const std::string> sentences,
                                   const std::string& protagonist, std::size_t sentence_index);
Messages identifier_rephrase_prompt(const std::string& title, std::span<const std::string> sentences);

}  // namespace narrative::llm
