#include "multisiam/synthetic.h"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "multisiam/rng.h"

namespace multisiam {
namespace {

struct CategoryLexicon {
  std::vector<std::string> keywords;
  std::vector<std::string> events;
};

const std::vector<CategoryLexicon>& lexicons() {
  static const std::vector<CategoryLexicon> table = {
      {{"ceo", "company", "shares", "merger", "earnings", "startup"},
       {"names a new chief executive", "announces a merger deal", "opens a new headquarters",
        "cuts jobs after weak earnings"}},
      {{"senate", "election", "minister", "policy", "campaign", "vote"},
       {"wins the regional election", "proposes a new tax bill", "resigns from the cabinet",
        "launches a reelection campaign"}},
      {{"star", "red carpet", "fans", "actor", "singer", "paparazzi"},
       {"announces a surprise engagement", "spotted at the film gala", "opens up about family life",
        "launches a fashion line"}},
      {{"movie", "series", "trailer", "streaming", "premiere", "show"},
       {"drops the first official trailer", "renewed for another season", "breaks box office records",
        "sets a premiere date"}},
      {{"stocks", "investors", "bank", "interest rates", "bonds", "crypto"},
       {"shares surge after results", "raises interest rates again", "reports record quarterly profit",
        "faces a regulatory probe"}},
      {{"health", "wellness", "diet", "sleep", "fitness", "doctors"},
       {"study links sleep to memory", "shares a simple morning routine", "warns about sugar intake",
        "recommends daily walking"}},
      {{"motivation", "mindset", "goals", "success", "habits", "inspiration"},
       {"shares advice on building habits", "explains how to stay focused", "tells a story of resilience",
        "urges people to start small"}},
      {{"match", "league", "coach", "goal", "tournament", "season"},
       {"wins the championship final", "signs a record transfer", "sacks the head coach",
        "clinches a late comeback victory"}},
      {{"news", "officials", "report", "city", "police", "authorities"},
       {"hit by severe flooding", "announces an emergency curfew", "opens an inquiry into the crash",
        "confirms a power outage"}},
      {{"sale", "discount", "offer", "coupon", "deal", "shop"},
       {"launches a weekend flash sale", "offers half price on all orders", "gives away free shipping codes",
        "starts a holiday discount"}},
      {{"game", "console", "players", "esports", "update", "studio"},
       {"releases a major patch", "announces a sequel at the expo", "delays the launch to next year",
        "tops the streaming charts"}},
      {{"travel", "flights", "beach", "hotel", "tourists", "visa"},
       {"named top holiday destination", "eases visa rules for tourists", "adds new direct flights",
        "reopens its historic old town"}},
      {{"tech", "software", "beta", "smartphone", "app", "chip"},
       {"releases a public software beta", "unveils a new smartphone", "patches a critical security flaw",
        "launches an ai assistant"}},
  };
  return table;
}

// Each template renders {E} entity, {V} event, {A}/{B} category keywords.
constexpr std::array<const char*, 8> kTemplates = {
    "{E} {V}",
    "breaking: {E} {V}",
    "reports say {E} {V} as {A} watchers react",
    "{A} update: {E} {V} today",
    "why it matters that {E} {V}",
    "{E} {V}, according to {B} sources",
    "here is what we know now that {E} {V}",
    "{B} roundup - {E} {V}",
};

std::string render(std::string tpl, const std::string& entity, const std::string& event, const std::string& a,
                   const std::string& b) {
  const std::array<std::pair<std::string, const std::string*>, 4> slots = {
      {{"{E}", &entity}, {"{V}", &event}, {"{A}", &a}, {"{B}", &b}}};
  for (const auto& [key, value] : slots) {
    for (std::size_t pos; (pos = tpl.find(key)) != std::string::npos;) tpl.replace(pos, key.size(), *value);
  }
  return tpl;
}

std::string make_name(SeededRng& rng) {
  static const std::array<const char*, 12> onsets = {"k", "v", "z", "t", "r", "m", "d", "l", "br", "st", "gr", "n"};
  static const std::array<const char*, 5> vowels = {"a", "e", "i", "o", "u"};
  static const std::array<const char*, 6> codas = {"x", "n", "r", "l", "th", "s"};
  std::string name;
  for (int s = 0; s < 2; ++s) {
    name += onsets[rng.below(onsets.size())];
    name += vowels[rng.below(vowels.size())];
  }
  name += codas[rng.below(codas.size())];
  name[0] = static_cast<char>(name[0] - 'a' + 'A');
  return name;
}

}  // namespace

const std::vector<std::string>& default_categories() {
  static const std::vector<std::string> names = {
      "Business", "Politics", "Celebrity", "Entertainment", "Finance", "Health & Wellness", "Motivation",
      "Sports",   "News",     "Promotions", "Gaming",       "Travel",  "Technology"};
  return names;
}

std::size_t SyntheticDataset::padded_texts(std::size_t pad_to) const { return groups * pad_to; }

SyntheticDataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.num_categories < 1 || cfg.num_categories > default_categories().size()) {
    throw std::invalid_argument("synthetic: num_categories must be between 1 and " +
                                std::to_string(default_categories().size()));
  }
  if (cfg.min_texts < 1 || cfg.max_texts < cfg.min_texts || cfg.max_texts > kTemplates.size()) {
    throw std::invalid_argument("synthetic: need 1 <= min_texts <= max_texts <= " + std::to_string(kTemplates.size()));
  }
  SeededRng rng(cfg.seed);
  SyntheticDataset out;
  std::set<std::string> used_names;

  for (std::size_t g = 0; g < cfg.total_groups; ++g) {
    const std::size_t cat = g % cfg.num_categories;
    const auto& lex = lexicons()[cat];
    std::string name;
    do {
      name = make_name(rng);
    } while (!used_names.insert(name).second);
    const auto& event = lex.events[rng.below(lex.events.size())];
    const std::size_t count = cfg.min_texts + rng.below(cfg.max_texts - cfg.min_texts + 1);

    std::vector<std::size_t> templates(kTemplates.size());
    for (std::size_t i = 0; i < templates.size(); ++i) templates[i] = i;
    rng.shuffle(templates);
    for (std::size_t t = 0; t < count; ++t) {
      const auto& a = lex.keywords[rng.below(lex.keywords.size())];
      const auto& b = lex.keywords[rng.below(lex.keywords.size())];
      out.records.push_back(GroupRecord{render(kTemplates[templates[t]], name, event, a, b),
                                        default_categories()[cat], static_cast<std::int64_t>(g + 1)});
    }
    ++out.groups;
    out.texts += count;
  }
  return out;
}

}  // namespace multisiam
