#include "narrative/llm/prompts.hpp"

#include <algorithm>

#include "narrative/text.hpp"

namespace narrative::llm {

namespace {

using discourse::ArcType;
using discourse::TurningPoint;

constexpr const char* kReaderSystem =
    "You are an expert in narrative analysis who reads film synopses closely.";
constexpr const char* kWriterSystem = "You are a skilled screenwriter who writes film synopses.";

const std::array<PromptTemplate, 12>& registry() {
  static const std::array<PromptTemplate, 12> templates = {{
      {TemplateName::ProtagonistId, kReaderSystem,
       "Read the story below. Each sentence is tagged with its index.\n\n"
       "{{narrative}}\n\n"
       "Who is the main character (protagonist) of this story?\n"
       "Answer with a JSON object of the form "
       "{\"explanation\": \"<one sentence>\", \"protagonist\": \"<name>\"}."},

      {TemplateName::EmotionAdjectives, kReaderSystem,
       "Story (each sentence tagged with its index):\n\n"
       "{{narrative}}\n\n"
       "The protagonist is {{protagonist}}. Consider sentence [{{sentence_index}}]:\n"
       "\"{{sentence}}\"\n\n"
       "Give exactly three single-word adjectives describing how {{protagonist}} feels at this "
       "point of the plot (for example: hopeful, calm, nervous).\n"
       "Answer with a JSON object of the form "
       "{\"adjectives\": [\"<adjective>\", \"<adjective>\", \"<adjective>\"]}."},

      {TemplateName::ArcIdentify, kReaderSystem,
       "A story arc describes how the fortune of the protagonist changes across the plot. "
       "The possible story arcs are:\n"
       "{{arc_definitions}}\n\n"
       "Story (each sentence tagged with its index):\n\n"
       "{{narrative}}\n\n"
       "Classify the story into exactly one of the story arcs above.\n"
       "Answer with a JSON object of the form "
       "{\"explanation\": \"<reasoning>\", \"arc\": \"<story arc name>\"}."},

      {TemplateName::ArcIdentifyWithTps, kReaderSystem,
       "A story arc describes how the fortune of the protagonist changes across the plot. "
       "The possible story arcs are:\n"
       "{{arc_definitions}}\n\n"
       "Story (each sentence tagged with its index):\n\n"
       "{{narrative}}\n\n"
       "The key turning points of this story are:\n"
       "{{tp_evidence}}\n\n"
       "Classify the story into exactly one of the story arcs above.\n"
       "Answer with a JSON object of the form "
       "{\"explanation\": \"<reasoning>\", \"arc\": \"<story arc name>\"}."},

      {TemplateName::TpIdentify, kReaderSystem,
       "A turning point is a plot moment that significantly changes how the story progresses. "
       "The five turning point types are:\n"
       "{{tp_definitions}}\n\n"
       "The story below has {{sentence_count}} sentences, each tagged with its index:\n\n"
       "{{narrative}}\n\n"
       "For each turning point type, give the index of the sentence where it occurs.\n"
       "Answer with a JSON object of the form "
       "{\"explanation\": \"<reasoning>\", \"tp1\": <index>, \"tp2\": <index>, \"tp3\": <index>, "
       "\"tp4\": <index>, \"tp5\": <index>}."},

      {TemplateName::TpIdentifyWithArc, kReaderSystem,
       "A turning point is a plot moment that significantly changes how the story progresses. "
       "The five turning point types are:\n"
       "{{tp_definitions}}\n\n"
       "The overall story arc of this story is {{arc_name}}: {{arc_description}}\n\n"
       "The story below has {{sentence_count}} sentences, each tagged with its index:\n\n"
       "{{narrative}}\n\n"
       "For each turning point type, give the index of the sentence where it occurs.\n"
       "Answer with a JSON object of the form "
       "{\"explanation\": \"<reasoning>\", \"tp1\": <index>, \"tp2\": <index>, \"tp3\": <index>, "
       "\"tp4\": <index>, \"tp5\": <index>}."},

      {TemplateName::OutlineOnly, kWriterSystem,
       "Write an outline for a {{genre}} film titled \"{{title}}\".\n"
       "Initial setting: {{setting}}\n\n"
       "The outline should have {{outline_beats}} beats, one plot event per beat.\n"
       "Answer with a JSON object of the form {\"outline\": [\"<beat>\", ...]}."},

      {TemplateName::ExpandOutline, kWriterSystem,
       "Expand the outline below into a full synopsis of the {{genre}} film \"{{title}}\".\n\n"
       "Outline:\n{{outline}}\n\n"
       "Write {{story_sentences}} sentences in plain prose.{{tp_instruction}}\n"
       "Answer with a JSON object of the form {{answer_format}}."},

      {TemplateName::SelfTpOutline, kWriterSystem,
       "Write an outline for a {{genre}} film titled \"{{title}}\".\n"
       "Initial setting: {{setting}}\n\n"
       "The outline should have {{outline_beats}} beats, one plot event per beat. It must "
       "contain these three turning points:\n"
       "{{tp_definitions}}\n"
       "Start the beat of each turning point with its tag: [TP3], [TP4] or [TP5].\n"
       "Answer with a JSON object of the form {\"outline\": [\"<beat>\", ...]}."},

      {TemplateName::HumanTpOutline, kWriterSystem,
       "Write an outline for a {{genre}} film titled \"{{title}}\".\n"
       "Initial setting: {{setting}}\n\n"
       "The outline should have {{outline_beats}} beats, one plot event per beat. It must "
       "contain these three turning points:\n"
       "{{tp_definitions}}\n"
       "The Major Setback is given and must be used as written: {{human_setback}}\n"
       "The Climax is given and must be used as written: {{human_climax}}\n"
       "Start the beat of each turning point with its tag: [TP3], [TP4] or [TP5].\n"
       "Answer with a JSON object of the form {\"outline\": [\"<beat>\", ...]}."},

      {TemplateName::ArcEnhanced, kWriterSystem,
       "Write an outline for a {{genre}} film titled \"{{title}}\".\n"
       "Initial setting: {{setting}}\n\n"
       "The story must follow the {{arc_name}} story arc: {{arc_description}}\n"
       "Number of major rises and falls: {{segment_count}} ({{segment_list}}).\n"
       "Initial state of the protagonist: {{start_state}}.\n"
       "Ending state of the protagonist: {{end_state}}.\n\n"
       "The outline should have {{outline_beats}} beats, one plot event per beat.\n"
       "Answer with a JSON object of the form {\"outline\": [\"<beat>\", ...]}."},

      {TemplateName::IdentifierRephrase, kWriterSystem,
       "Below are the title and synopsis of a film. List every unique identifier in them "
       "(proper nouns such as names of people, places, organisations and products) and propose "
       "a plausible, different replacement for each one. Leave common words alone.\n\n"
       "Title: {{title}}\n\n"
       "{{narrative}}\n\n"
       "Answer with a JSON object of the form "
       "{\"substitutions\": {\"<original>\": \"<replacement>\", ...}}. Use an empty object if "
       "there are no identifiers."},
  }};
  return templates;
}

constexpr std::array<std::string_view, 12> kKeys = {
    "protagonist_id", "emotion_adjectives", "arc_identify",     "arc_identify_with_tps",
    "tp_identify",    "tp_identify_with_arc", "outline_only",   "expand_outline",
    "self_tp_outline", "human_tp_outline",   "arc_enhanced",    "identifier_rephrase",
};

std::string fortune_phrase(discourse::FortuneLevel level) {
  return level == discourse::FortuneLevel::High ? "high (good fortune)" : "low (bad fortune)";
}

}  // namespace

std::string_view template_key(TemplateName name) { return kKeys[static_cast<std::size_t>(name)]; }

std::optional<TemplateName> template_from_key(std::string_view key) {
  for (std::size_t i = 0; i < kKeys.size(); ++i)
    if (kKeys[i] == key) return static_cast<TemplateName>(i);
  return std::nullopt;
}

const PromptTemplate& get_template(TemplateName name) {
  return registry()[static_cast<std::size_t>(name)];
}

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = body.find("{{", pos)) != std::string::npos) {
    const auto end = body.find("}}", pos + 2);
    if (end == std::string::npos) break;
    std::string name = body.substr(pos + 2, end - pos - 2);
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    pos = end + 2;
  }
  return names;
}

Messages render(const PromptTemplate& tmpl, const Bindings& bindings) {
  std::string out;
  out.reserve(tmpl.body.size() * 2);
  std::size_t pos = 0;
  while (pos < tmpl.body.size()) {
    const auto open = tmpl.body.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tmpl.body, pos);
      break;
    }
    const auto close = tmpl.body.find("}}", open + 2);
    if (close == std::string::npos) throw RenderError("unterminated placeholder in template");
    out.append(tmpl.body, pos, open - pos);
    const std::string name = tmpl.body.substr(open + 2, close - open - 2);
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw RenderError("template '" + std::string(template_key(tmpl.name)) +
                        "': unbound placeholder '" + name + "'");
    }
    out += it->second;
    pos = close + 2;
  }
  return {{"system", tmpl.system}, {"user", out}};
}

std::string indexed_narrative(std::span<const std::string> sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out += '\n';
    out += '[' + std::to_string(i + 1) + "] " + sentences[i];
  }
  return out;
}

std::string arc_definitions() {
  std::string out;
  for (ArcType arc : discourse::kAllArcs) {
    if (!out.empty()) out += '\n';
    out += "- " + std::string(discourse::arc_display_name(arc)) + ": " +
           std::string(discourse::arc_description(arc));
  }
  return out;
}

std::string tp_definitions(std::span<const TurningPoint> tps) {
  std::string out;
  for (TurningPoint tp : tps) {
    if (!out.empty()) out += '\n';
    out += std::string(discourse::tp_label(tp)) + " - " + std::string(discourse::tp_name(tp)) +
           ": " + std::string(discourse::tp_description(tp));
  }
  return out;
}

std::string tp_evidence(std::span<const std::string> sentences,
                        const discourse::TurningPointSet& tps) {
  tps.validate(sentences.size());
  std::string out;
  for (TurningPoint tp : discourse::kAllTurningPoints) {
    if (!out.empty()) out += '\n';
    const int p = tps[tp];
    out += std::string(discourse::tp_label(tp)) + " - " + std::string(discourse::tp_name(tp)) +
           " (" + std::string(discourse::tp_description(tp)) + ") occurs at sentence " +
           std::to_string(p) + ": \"" + sentences[static_cast<std::size_t>(p - 1)] + "\"";
  }
  return out;
}

Bindings arc_shape_bindings(ArcType arc) {
  const auto& shape = discourse::arc_shape(arc);
  std::vector<std::string> parts;
  for (const auto& seg : shape.segments) {
    std::string s = seg.emphasis == discourse::Emphasis::Significant ? "significant " : "";
    parts.push_back(s + std::string(discourse::direction_name(seg.direction)));
  }
  return {{"arc_name", std::string(discourse::arc_display_name(arc))},
          {"arc_description", std::string(discourse::arc_description(arc))},
          {"segment_count", std::to_string(shape.segments.size())},
          {"segment_list", text::join(parts, ", ")},
          {"start_state", fortune_phrase(shape.start_level)},
          {"end_state", fortune_phrase(shape.end_level)}};
}

Messages arc_identify_prompt(std::span<const std::string> sentences) {
  return render(get_template(TemplateName::ArcIdentify),
                {{"arc_definitions", arc_definitions()}, {"narrative", indexed_narrative(sentences)}});
}

Messages arc_identify_with_tps_prompt(std::span<const std::string> sentences,
                                      const discourse::TurningPointSet& gold_tps) {
  return render(get_template(TemplateName::ArcIdentifyWithTps),
                {{"arc_definitions", arc_definitions()},
                 {"narrative", indexed_narrative(sentences)},
                 {"tp_evidence", tp_evidence(sentences, gold_tps)}});
}

Messages tp_identify_prompt(std::span<const std::string> sentences) {
  return render(get_template(TemplateName::TpIdentify),
                {{"tp_definitions", tp_definitions(discourse::kAllTurningPoints)},
                 {"sentence_count", std::to_string(sentences.size())},
                 {"narrative", indexed_narrative(sentences)}});
}

Messages tp_identify_with_arc_prompt(std::span<const std::string> sentences, ArcType gold_arc) {
  return render(get_template(TemplateName::TpIdentifyWithArc),
                {{"tp_definitions", tp_definitions(discourse::kAllTurningPoints)},
                 {"arc_name", std::string(discourse::arc_display_name(gold_arc))},
                 {"arc_description", std::string(discourse::arc_description(gold_arc))},
                 {"sentence_count", std::to_string(sentences.size())},
                 {"narrative", indexed_narrative(sentences)}});
}

Messages protagonist_prompt(std::span<const std::string> sentences) {
  return render(get_template(TemplateName::ProtagonistId),
                {{"narrative", indexed_narrative(sentences)}});
}

Messages emotion_adjectives_prompt(std::span<const std::string> sentences,
                                   const std::string& protagonist, std::size_t sentence_index) {
  if (sentence_index < 1 || sentence_index > sentences.size())
    throw DomainError("sentence index " + std::to_string(sentence_index) + " out of range");
  return render(get_template(TemplateName::EmotionAdjectives),
                {{"narrative", indexed_narrative(sentences)},
                 {"protagonist", protagonist},
                 {"sentence_index", std::to_string(sentence_index)},
                 {"sentence", sentences[sentence_index - 1]}});
}

Messages identifier_rephrase_prompt(const std::string& title, std::span<const std::string> sentences) {
  return render(get_template(TemplateName::IdentifierRephrase),
                {{"title", title}, {"narrative", indexed_narrative(sentences)}});
}

}  // namespace narrative::llm
