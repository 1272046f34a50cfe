#include <gtest/gtest.h>

#include <regex>

#include "narrative/llm/client.hpp"
#include "narrative/llm/parallel.hpp"
#include "narrative/llm/parsers.hpp"
#include "narrative/llm/prompts.hpp"
#include "support/support.hpp"

using namespace narrative;
namespace nt = narrative::testing;
using namespace narrative::llm;
using narrative::testing::ScriptedProvider;

namespace {

std::vector<std::string> numbered(std::size_t n) {
  std::vector<std::string> s;
  for (std::size_t i = 1; i <= n; ++i) s.push_back("Sentence number " + std::to_string(i) + " happens.");
  return s;
}

std::string user_text(const Messages& m) {
  std::string all;
  for (const auto& msg : m) all += msg.content + "\n";
  return all;
}

std::size_t count_markers(const std::string& s) {
  static const std::regex marker(R"((^|\n)\[(\d+)\] )");
  return std::distance(std::sregex_iterator(s.begin(), s.end(), marker), std::sregex_iterator());
}

}  // namespace

TEST(CacheKey, StableAndSensitive) {
  const Messages m = {{"system", "s"}, {"user", "u"}};
  EXPECT_EQ(cache_key("a", 0.0, m), cache_key("a", 0.0, m));
  EXPECT_NE(cache_key("a", 0.0, m), cache_key("b", 0.0, m));
  EXPECT_NE(cache_key("a", 0.0, m), cache_key("a", 1.0, m));
  EXPECT_NE(cache_key("a", 0.0, m), cache_key("a", 0.0, Messages{{"system", "s"}, {"user", "v"}}));
  EXPECT_EQ(cache_key("a", 0.0, m).size(), 64u);
}

TEST(Config, TemperaturesAndValidation) {
  ProviderConfig c;
  EXPECT_EQ(c.temperature_for(TaskKind::Comprehension), 0.0);
  EXPECT_EQ(c.temperature_for(TaskKind::Generation), 1.0);
  c.temperature = 0.3;
  EXPECT_EQ(c.temperature_for(TaskKind::Generation), 0.3);
  c.max_retries = -1;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(Config, JsonRoundTripHasNoSecret) {
  ProviderConfig c;
  c.kind = "openai";
  c.endpoint = "https://example.invalid/v1/chat/completions";
  c.model = "m";
  const auto j = c.to_json();
  const auto back = ProviderConfig::from_json("mock", j);
  EXPECT_EQ(back.model, "m");
  EXPECT_EQ(back.endpoint, c.endpoint);
  EXPECT_EQ(j.dump().find("Bearer"), std::string::npos);
}

TEST(Client, RetriesOn429ThenCaches) {
  auto p = std::make_shared<ScriptedProvider>();
  p->push(429, "slow down");
  p->push(200, "ok");
  ChatClient client(nt::fast_config(), p);
  const Messages m = {{"user", "hi"}};
  auto first = client.complete(m);
  EXPECT_EQ(first.response, "ok");
  EXPECT_FALSE(first.from_cache);
  EXPECT_EQ(p->calls(), 2);
  auto second = client.complete(m);
  EXPECT_TRUE(second.from_cache);
  EXPECT_EQ(second.response, "ok");
  EXPECT_EQ(p->calls(), 2);
  EXPECT_EQ(client.stats().cache_hits, 1u);
}

TEST(Client, TransportErrorsRetriedUntilExhausted) {
  auto p = std::make_shared<ScriptedProvider>();
  for (int i = 0; i < 3; ++i) p->push(-1, "");
  ChatClient client(nt::fast_config(), p);
  EXPECT_THROW(client.complete({{"user", "x"}}), ProviderError);
  EXPECT_EQ(p->calls(), 3);
}

TEST(Client, ClientErrorNotRetried) {
  auto p = std::make_shared<ScriptedProvider>();
  p->push(400, "bad request");
  p->push(200, "never");
  ChatClient client(nt::fast_config(), p);
  try {
    client.complete({{"user", "x"}});
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 400);
  }
  EXPECT_EQ(p->calls(), 1);
}

TEST(Client, TemperatureFollowsTask) {
  auto p = std::make_shared<ScriptedProvider>([](const ProviderRequest&) { return ProviderReply{200, "a"}; });
  ChatClient client(nt::fast_config(), p);
  client.complete({{"user", "x"}}, TaskKind::Comprehension);
  EXPECT_EQ(p->last_temperature(), 0.0);
  client.complete({{"user", "y"}}, TaskKind::Generation);
  EXPECT_EQ(p->last_temperature(), 1.0);
}

TEST(Client, PersistentCacheSurvivesNewClient) {
  nt::TempDir dir("cache");
  const Messages m = {{"user", "persist"}};
  {
    auto p = std::make_shared<ScriptedProvider>();
    p->push(200, "stored");
    ChatClient client(nt::fast_config(), p, std::make_shared<ResponseCache>(dir.path()));
    client.complete(m);
  }
  auto p = std::make_shared<ScriptedProvider>();
  ChatClient client(nt::fast_config(), p, std::make_shared<ResponseCache>(dir.path()));
  auto ex = client.complete(m);
  EXPECT_TRUE(ex.from_cache);
  EXPECT_EQ(ex.response, "stored");
  EXPECT_EQ(p->calls(), 0);
}

TEST(Mock, UnknownKeyIsProviderFailure) {
  auto mock = std::make_shared<MockProvider>();
  ChatClient client(nt::fast_config(), mock);
  EXPECT_THROW(client.complete({{"user", "unknown"}}), ProviderError);
  EXPECT_EQ(mock->missing_keys().size(), 1u);
}

TEST(Mock, TranscriptFileRoundTrip) {
  nt::TempDir dir("transcript");
  const ProviderConfig config = nt::fast_config();
  const Messages m = {{"user", "q"}};
  write_transcript(dir / "t.json", {{cache_key(config.model, 0.0, m), "answer"}});
  auto mock = MockProvider::from_file(dir / "t.json");
  ChatClient client(config, mock);
  EXPECT_EQ(client.complete(m).response, "answer");
}

TEST(Structured, RepairFollowUpAppendsInstruction) {
  auto p = std::make_shared<ScriptedProvider>();
  p->push(200, "I think it is a sad story.");
  p->push(200, "{\"arc\": \"Icarus\"}");
  ChatClient client(nt::fast_config(), p);
  auto r = complete_structured<discourse::ArcType>(client, {{"user", "classify"}}, [](const std::string& s) { return parse_arc(s); });
  ASSERT_TRUE(r.value);
  EXPECT_EQ(*r.value, discourse::ArcType::Icarus);
  ASSERT_EQ(r.exchanges.size(), 2u);
  const auto last = p->last_messages();
  ASSERT_EQ(last.size(), 3u);
  EXPECT_EQ(last[1].role, "assistant");
  EXPECT_EQ(last[2].content, kRepairInstruction);
}

TEST(Structured, GivesUpAfterRepairs) {
  auto p = std::make_shared<ScriptedProvider>([](const ProviderRequest&) { return ProviderReply{200, "no idea"}; });
  ChatClient client(nt::fast_config(), p);
  auto r = complete_structured<discourse::ArcType>(client, {{"user", "x"}}, [](const std::string& s) { return parse_arc(s); },
                                                  TaskKind::Comprehension, 2);
  EXPECT_FALSE(r.value);
  EXPECT_FALSE(r.error.empty());
  EXPECT_EQ(r.exchanges.size(), 3u);
}

TEST(Parsers, ExtractJsonVariants) {
  EXPECT_EQ((*extract_json_object("{\"a\":1}"))["a"], 1);
  EXPECT_EQ((*extract_json_object("Sure:\n```json\n{\"a\":2}\n```"))["a"], 2);
  EXPECT_EQ((*extract_json_object("prefix {\"a\":3} suffix"))["a"], 3);
  EXPECT_FALSE(extract_json_object("nothing here"));
}

TEST(Parsers, ArcAnswers) {
  EXPECT_EQ(parse_arc("{\"arc\": \"Man in Hole\"}"), discourse::ArcType::ManInHole);
  EXPECT_EQ(parse_arc("The arc is Oedipus."), discourse::ArcType::Oedipus);
  // "Man in Hole" inside "Double Man in Hole" is not a second candidate.
  EXPECT_EQ(parse_arc("This is a Double Man in Hole story."), discourse::ArcType::DoubleManInHole);
  EXPECT_THROW(parse_arc("Either Icarus or Cinderella."), ParseError);
  EXPECT_THROW(parse_arc("No idea."), ParseError);
}

TEST(Parsers, TpAnswers) {
  const auto tps = parse_tps("{\"tp1\": 1, \"tp2\": 3, \"tp3\": 5, \"tp4\": 7, \"tp5\": 9}", 10);
  EXPECT_EQ(tps.positions(), (std::array<int, 5>{1, 3, 5, 7, 9}));
  EXPECT_EQ(parse_tps("{\"turning_points\": {\"tp1\": 1, \"tp2\": 2, \"tp3\": 3, \"tp4\": 4, \"tp5\": 5}}", 5)
                .positions()[4],
            5);
  EXPECT_THROW(parse_tps("{\"tp1\": 1, \"tp2\": 3, \"tp3\": 5, \"tp4\": 7, \"tp5\": 11}", 10), ParseError);
  EXPECT_THROW(parse_tps("{\"tp1\": 1, \"tp2\": 3}", 10), ParseError);
  EXPECT_THROW(parse_tps("{\"tp1\": 1.5, \"tp2\": 3, \"tp3\": 5, \"tp4\": 7, \"tp5\": 9}", 10), ParseError);
  EXPECT_EQ(parse_tps(format_tps(tps), 10), tps);
}

TEST(Parsers, AdjectivesAndOthers) {
  EXPECT_EQ(parse_adjectives("{\"adjectives\": [\"Happy\", \"calm\", \"proud\"]}"),
            (std::array<std::string, 3>{"happy", "calm", "proud"}));
  EXPECT_EQ(parse_adjectives("tense, afraid, angry"), (std::array<std::string, 3>{"tense", "afraid", "angry"}));
  EXPECT_THROW(parse_adjectives("sad, tired"), ParseError);
  EXPECT_EQ(parse_protagonist("{\"protagonist\": \"Ana\"}"), "Ana");
  EXPECT_EQ(parse_substitutions("{\"substitutions\": {\"Paris\": \"Lyon\"}}").at("Paris"), "Lyon");
  EXPECT_THROW(parse_string_list("{\"outline\": []}", "outline"), ParseError);
}

TEST(Prompts, EveryTemplateRendersWithItsPlaceholders) {
  for (int i = 0; i <= static_cast<int>(TemplateName::IdentifierRephrase); ++i) {
    const auto name = static_cast<TemplateName>(i);
    EXPECT_EQ(template_from_key(template_key(name)), name);
    const auto& t = get_template(name);
    Bindings b;
    for (const auto& p : t.placeholders()) b[p] = "<" + p + ">";
    const auto m = render(t, b);
    EXPECT_EQ(user_text(m).find("{{"), std::string::npos) << template_key(name);
    if (!t.placeholders().empty()) {
      b.erase(t.placeholders().front());
      EXPECT_THROW(render(t, b), RenderError);
    }
  }
}

TEST(Prompts, TpPromptsHaveExactlyNMarkers) {
  for (std::size_t n : {5u, 12u, 31u}) {
    const auto s = numbered(n);
    EXPECT_EQ(count_markers(user_text(tp_identify_prompt(s))), n);
    EXPECT_EQ(count_markers(user_text(tp_identify_with_arc_prompt(s, discourse::ArcType::Icarus))), n);
  }
}

TEST(Prompts, ArcPromptListsEveryArc) {
  const auto text = user_text(arc_identify_prompt(numbered(6)));
  for (auto a : discourse::kAllArcs) EXPECT_NE(text.find(discourse::arc_display_name(a)), std::string::npos);
}

TEST(Prompts, TpEvidenceQuotesGoldSentences) {
  const auto s = numbered(8);
  const auto text = user_text(arc_identify_with_tps_prompt(s, discourse::TurningPointSet({1, 2, 4, 6, 8})));
  EXPECT_NE(text.find("Sentence number 4 happens."), std::string::npos);
  EXPECT_NE(text.find("Major Setback"), std::string::npos);
}

TEST(Parallel, ResultsByIndexAndFirstErrorRethrown) {
  std::vector<int> out(100);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 5) throw InputError("boom"); }), InputError);
}
