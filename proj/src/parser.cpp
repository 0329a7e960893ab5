#include "stackeval/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <set>

namespace stackeval {

namespace {

struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

using Tokens = std::vector<Token>;

const std::map<std::string, std::string, std::less<>>& verb_forms() {
  static const std::map<std::string, std::string, std::less<>> kForms = [] {
    std::map<std::string, std::string, std::less<>> m;
    const std::vector<std::vector<std::string>> table = {
        {"place", "places", "placed", "placing"},
        {"put", "puts", "putting"},
        {"stack", "stacks", "stacked", "stacking"},
        {"position", "positions", "positioned", "positioning"},
        {"move", "moves", "moved", "moving"},
        {"lay", "lays", "laid", "laying"},
        {"set", "sets", "setting"},
        {"rotate", "rotates", "rotated", "rotating"},
        {"stand", "stands", "stood", "standing"},
        {"climb", "climbs", "climbed", "climbing"},
        {"jump", "jumps", "jumped", "jumping"},
    };
    for (const auto& row : table) {
      for (const auto& form : row) m.emplace(form, row.front());
    }
    return m;
  }();
  return kForms;
}

const std::map<std::string, std::string, std::less<>> kNouns = {
    {"cube", "cube"},         {"block", "cube"},          {"cylinder", "cylinder"},
    {"sphere", "sphere"},     {"ball", "sphere"},         {"cuboid", "cuboid"},
    {"pyramid", "pyramid"},   {"wedge", "wedge"},         {"egg", "egg"},
    {"ellipsoid", "ellipsoid"}, {"capsule", "capsule"},   {"platform", "platform"},
};

const std::set<std::string, std::less<>> kColors = {"blue",  "green", "red",    "white", "yellow",
                                                    "gray",  "grey",  "black",  "orange", "purple"};

const std::map<std::string, int, std::less<>> kOrdinalWords = {
    {"first", 1}, {"second", 2}, {"third", 3}, {"fourth", 4}, {"fifth", 5},
    {"sixth", 6}, {"seventh", 7}, {"eighth", 8}, {"ninth", 9}, {"tenth", 10}};

const std::map<std::string, int, std::less<>> kCounts = {{"two", 2},  {"three", 3}, {"four", 4},
                                                         {"five", 5}, {"both", 2}};

const std::set<std::string, std::less<>> kNounBlockers = {"the",  "a",    "an",   "this",  "that", "same",
                                                          "its",  "their", "each", "your", "my"};

const std::set<std::string, std::less<>> kAux = {"be", "is", "are", "been", "was", "were", "being", "get"};

const std::set<std::string, std::less<>> kModals = {"can", "could", "should", "must", "will", "would",
                                                    "may", "might", "shall", "also", "then", "now", "first"};

const std::set<std::string, std::less<>> kLeadIns = {"first", "firstly", "then", "next", "finally", "lastly",
                                                     "now",   "after",   "that",  "and",  "second",  "secondly",
                                                     "third", "thirdly", "please", ","};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '_' || c == '-';
}

Tokens tokenize(std::string_view s) {
  Tokens out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    if (c == '#' && i + 1 < s.size() && (std::isalnum(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '_')) {
      ++i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({std::string(s.substr(begin, i - begin)), begin, i});
      continue;
    }
    if ((c == '+' || c == '-') && i + 1 < s.size() && std::string_view("xyzXYZ").find(s[i + 1]) != std::string_view::npos &&
        (i + 2 == s.size() || !is_word_char(s[i + 2]))) {
      out.push_back({lower(s.substr(i, 2)), begin, i + 2});
      i += 2;
      continue;
    }
    if (c == '@') {
      ++i;
      while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({std::string(s.substr(begin, i - begin)), begin, i});
      continue;
    }
    if (c == ',') {
      out.push_back({",", begin, i + 1});
      ++i;
      continue;
    }
    if (is_word_char(c) && c != '-' && c != '\'') {
      while (i < s.size()) {
        if (is_word_char(s[i])) {
          ++i;
        } else if (s[i] == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])) &&
                   std::isdigit(static_cast<unsigned char>(s[i - 1]))) {
          ++i;
        } else {
          break;
        }
      }
      out.push_back({lower(s.substr(begin, i - begin)), begin, i});
      continue;
    }
    ++i;
  }
  return out;
}

bool is_verb_at(const Tokens& t, std::size_t i) {
  if (!verb_forms().count(t[i].text)) return false;
  if (i > 0 && kNounBlockers.count(t[i - 1].text)) return false;
  if (i + 1 < t.size() && t[i + 1].text == "of") return false;
  return true;
}

bool is_base_verb(const std::string& w) {
  auto it = verb_forms().find(w);
  return it != verb_forms().end() && it->second == w;
}

bool match(const Tokens& t, std::size_t i, std::initializer_list<std::string_view> words) {
  if (i + words.size() > t.size()) return false;
  std::size_t k = i;
  for (std::string_view w : words) {
    if (t[k++].text != w) return false;
  }
  return true;
}

// ---------------------------------------------------------------- orientation

std::optional<Axis> axis_token(const std::string& w) {
  if (w == "+x" || w == "x") return Axis::PosX;
  if (w == "-x") return Axis::NegX;
  if (w == "+y" || w == "y") return Axis::PosY;
  if (w == "-y") return Axis::NegY;
  if (w == "+z" || w == "z") return Axis::PosZ;
  if (w == "-z") return Axis::NegZ;
  return std::nullopt;
}

// Removes every orientation phrase; the first one found wins.
OrientationRef extract_orientation(Tokens& t) {
  OrientationRef found;
  bool have = false;
  auto take = [&](std::size_t i, std::size_t n, OrientationRef o) {
    t.erase(t.begin() + static_cast<long>(i), t.begin() + static_cast<long>(i + n));
    if (!have) {
      found = o;
      have = true;
    }
  };
  for (std::size_t i = 0; i < t.size();) {
    const bool with = match(t, i, {"with", "its"}) || match(t, i, {"with", "the"}) || match(t, i, {"with", "their"});
    const std::size_t j = with ? i + 2 : i;
    if (j + 1 < t.size() && axis_token(t[j].text) && t[j + 1].text == "axis") {
      std::size_t n = j + 2 - i;
      if (match(t, j + 2, {"pointing", "up"}) || match(t, j + 2, {"facing", "up"})) {
        n += 2;
      } else if (j + 2 < t.size() && (t[j + 2].text == "up" || t[j + 2].text == "upward" ||
                                      t[j + 2].text == "upwards" || t[j + 2].text == "vertical")) {
        n += 1;
      } else {
        ++i;
        continue;
      }
      take(i, n, {OrientationKind::AxisUp, *axis_token(t[j].text)});
      continue;
    }
    auto side_down = [&](std::size_t k) -> std::size_t {
      if (match(t, k, {"side", "down"}) || match(t, k, {"face", "down"}) || match(t, k, {"end", "down"})) return 2;
      if (match(t, k, {"side", "facing", "down"}) || match(t, k, {"face", "facing", "down"})) return 3;
      return 0;
    };
    if (j < t.size() && t[j].text == "flat") {
      if (std::size_t n = side_down(j + 1)) {
        take(i, j + 1 + n - i, {OrientationKind::FlatSideDown, Axis::PosY});
        continue;
      }
    }
    if (j < t.size() && (t[j].text == "round" || t[j].text == "curved" || t[j].text == "rounded")) {
      if (std::size_t n = side_down(j + 1)) {
        take(i, j + 1 + n - i, {OrientationKind::RoundSideDown, Axis::PosY});
        continue;
      }
    }
    if (match(t, i, {"upside", "down"})) {
      take(i, 2, {OrientationKind::UpsideDown, Axis::PosY});
      continue;
    }
    if (match(t, i, {"on", "its", "side"}) || match(t, i, {"on", "their", "side"}) ||
        match(t, i, {"on", "their", "sides"})) {
      take(i, 3, {OrientationKind::OnSide, Axis::PosY});
      continue;
    }
    if (match(t, i, {"lying", "down"})) {
      take(i, 2, {OrientationKind::OnSide, Axis::PosY});
      continue;
    }
    if (t[i].text == "sideways" || t[i].text == "horizontally") {
      take(i, 1, {OrientationKind::OnSide, Axis::PosY});
      continue;
    }
    if (match(t, i, {"on", "its", "end"}) || match(t, i, {"on", "its", "base"}) ||
        match(t, i, {"on", "their", "ends"})) {
      take(i, 3, {OrientationKind::Upright, Axis::PosY});
      continue;
    }
    if (match(t, i, {"standing", "up"}) || match(t, i, {"on", "end"})) {
      take(i, 2, {OrientationKind::Upright, Axis::PosY});
      continue;
    }
    if (t[i].text == "upright" || t[i].text == "vertically") {
      take(i, 1, {OrientationKind::Upright, Axis::PosY});
      continue;
    }
    ++i;
  }
  return found;
}

// ---------------------------------------------------------------- noun phrases

struct NounPhrase {
  std::vector<ObjectRef> refs;
  bool ground = false;
  std::size_t end = 0;
};

bool is_list_break(const Tokens& t, std::size_t i);

enum class FrameKind { None, Chain, On, NextTo, InFrontOf, Behind, SameAs, Coordinates, Stop };

struct FrameMatch {
  FrameKind kind = FrameKind::None;
  std::size_t length = 0;
};

FrameMatch frame_at(const Tokens& t, std::size_t i) {
  if (i >= t.size()) return {};
  static const std::vector<std::pair<std::vector<std::string>, FrameKind>> kFrames = {
      {{"on", "top", "of", "each", "other"}, FrameKind::Chain},
      {{"on", "top", "of", "one", "another"}, FrameKind::Chain},
      {{"on", "each", "other"}, FrameKind::Chain},
      {{"onto", "each", "other"}, FrameKind::Chain},
      {{"atop", "each", "other"}, FrameKind::Chain},
      {{"on", "top", "of"}, FrameKind::On},
      {{"onto", "the", "top", "of"}, FrameKind::On},
      {{"on", "the", "top", "of"}, FrameKind::On},
      {{"onto"}, FrameKind::On},
      {{"atop"}, FrameKind::On},
      {{"upon"}, FrameKind::On},
      {{"on"}, FrameKind::On},
      {{"next", "to"}, FrameKind::NextTo},
      {{"adjacent", "to"}, FrameKind::NextTo},
      {{"beside"}, FrameKind::NextTo},
      {{"besides"}, FrameKind::NextTo},
      {{"near"}, FrameKind::NextTo},
      {{"alongside"}, FrameKind::NextTo},
      {{"to", "the", "left", "of"}, FrameKind::NextTo},
      {{"to", "the", "right", "of"}, FrameKind::NextTo},
      {{"in", "front", "of"}, FrameKind::InFrontOf},
      {{"behind"}, FrameKind::Behind},
      {{"in", "back", "of"}, FrameKind::Behind},
      {{"in", "the", "same", "place", "as"}, FrameKind::SameAs},
      {{"in", "the", "same", "position", "as"}, FrameKind::SameAs},
      {{"in", "the", "same", "spot", "as"}, FrameKind::SameAs},
      {{"in", "the", "same", "location", "as"}, FrameKind::SameAs},
      {{"at", "the", "same", "place", "as"}, FrameKind::SameAs},
      {{"at", "the", "same", "position", "as"}, FrameKind::SameAs},
      {{"at", "the", "same", "spot", "as"}, FrameKind::SameAs},
      {{"at", "the", "same", "location", "as"}, FrameKind::SameAs},
      {{"at", "@coords"}, FrameKind::Coordinates},
      {{"to", "reach"}, FrameKind::Stop},
      {{"to", "get"}, FrameKind::Stop},
      {{"to", "create"}, FrameKind::Stop},
      {{"to", "make"}, FrameKind::Stop},
      {{"to", "form"}, FrameKind::Stop},
      {{"to", "build"}, FrameKind::Stop},
      {{"in", "order"}, FrameKind::Stop},
      {{"so"}, FrameKind::Stop},
      {{"until"}, FrameKind::Stop},
      {{"which"}, FrameKind::Stop},
      {{"that"}, FrameKind::Stop},
      {{"for"}, FrameKind::Stop},
  };
  for (const auto& [words, kind] : kFrames) {
    if (i + words.size() > t.size()) continue;
    bool ok = true;
    for (std::size_t k = 0; k < words.size() && ok; ++k) ok = t[i + k].text == words[k];
    if (!ok) continue;
    // "on the left" / "on the right" describe the noun, not a target.
    if (kind == FrameKind::On && words.size() == 1 && words[0] == "on" &&
        (match(t, i + 1, {"the", "left"}) || match(t, i + 1, {"the", "right"})) &&
        !(i + 3 < t.size() && t[i + 3].text == "of")) {
      return {};
    }
    return {kind, words.size()};
  }
  return {};
}

std::optional<std::string> noun_at(const std::string& w, bool& plural) {
  plural = false;
  if (auto it = kNouns.find(w); it != kNouns.end()) return it->second;
  if (w.size() > 1 && w.back() == 's') {
    if (auto it = kNouns.find(w.substr(0, w.size() - 1)); it != kNouns.end()) {
      plural = true;
      return it->second;
    }
  }
  return std::nullopt;
}

std::optional<NounPhrase> parse_np(const Tokens& t, std::size_t i) {
  NounPhrase np;
  ObjectRef ref;
  int count = -1;  // -1: singular
  bool determined = false;
  bool partitive = false;  // "one of the cubes" names a single cube

  if (i >= t.size()) return std::nullopt;
  if (t[i].text.front() == '#') {
    ref.tag = t[i].text.substr(1);
    np.refs.push_back(ref);
    np.end = i + 1;
    return np;
  }
  if (t[i].text == "it") {
    ref.determiner = Determiner::Anaphor;
    np.refs.push_back(ref);
    np.end = i + 1;
    return np;
  }

  // Determiner.
  if (match(t, i, {"one", "of", "the"})) {
    ref.determiner = Determiner::Indefinite;
    i += 3;
    determined = true;
    partitive = true;
  } else if (match(t, i, {"the", "other"}) || match(t, i, {"the", "remaining"})) {
    ref.determiner = Determiner::Other;
    i += 2;
    determined = true;
  } else if (t[i].text == "another" || t[i].text == "other" || t[i].text == "remaining") {
    ref.determiner = Determiner::Other;
    i += 1;
    determined = true;
  } else if (t[i].text == "a" || t[i].text == "an" || t[i].text == "one") {
    ref.determiner = Determiner::Indefinite;
    i += 1;
    determined = true;
  } else if (match(t, i, {"all", "of", "the"})) {
    count = 0;
    i += 3;
  } else if (match(t, i, {"all", "the"})) {
    count = 0;
    i += 2;
  } else if (t[i].text == "the" || t[i].text == "this" || t[i].text == "that") {
    i += 1;
    determined = true;
  }
  if (match(t, i, {"top", "of", "the"})) i += 3;
  if (match(t, i, {"both", "of", "the"})) {
    count = 2;
    i += 3;
  }
  if (i < t.size()) {
    if (auto it = kCounts.find(t[i].text); it != kCounts.end()) {
      count = it->second;
      ++i;
    }
  }

  if (match(t, i, {"ground"}) || match(t, i, {"floor"})) {
    np.ground = true;
    np.end = i + 1;
    return np;
  }

  // Modifiers then the noun, skipping up to three unknown words.
  int unknown = 0;
  std::string last_unknown;
  std::optional<std::string> noun;
  bool plural = false;
  while (i < t.size()) {
    const std::string& w = t[i].text;
    if (w == "," || w == "and" || frame_at(t, i).kind != FrameKind::None || is_verb_at(t, i) ||
        w == "the" || w == "a" || w == "an") {
      break;
    }
    if ((w == "stack" || w == "tower" || w == "pile") && i + 1 < t.size() && t[i + 1].text == "of") {
      std::size_t k = i + 2;
      if (k < t.size() && kCounts.count(t[k].text)) ++k;
      bool pl = false;
      if (k < t.size()) {
        if (auto n = noun_at(t[k].text, pl)) {
          ref.group = true;
          ref.shape = *n;
          ref.determiner = Determiner::Definite;
          ref.color.clear();
          ref.size = SizeDescriptor::None;
          ref.side = SideDescriptor::None;
          ref.ordinal = 0;
          np.refs.push_back(ref);
          np.end = k + 1;
          return np;
        }
      }
      return std::nullopt;
    }
    if (auto n = noun_at(w, plural)) {
      noun = n;
      ++i;
      break;
    }
    if (auto it = kOrdinalWords.find(w); it != kOrdinalWords.end()) {
      ref.ordinal = it->second;
    } else if (w == "left" || w == "leftmost") {
      ref.side = SideDescriptor::Left;
    } else if (w == "right" || w == "rightmost") {
      ref.side = SideDescriptor::Right;
    } else if (w == "front") {
      ref.side = SideDescriptor::Front;
    } else if (w == "back" || w == "rear") {
      ref.side = SideDescriptor::Behind;
    } else if (w == "small" || w == "smaller" || w == "smallest" || w == "little") {
      ref.size = SizeDescriptor::Small;
    } else if (w == "large" || w == "larger" || w == "largest" || w == "big" || w == "bigger" || w == "biggest") {
      ref.size = SizeDescriptor::Large;
    } else if (kColors.count(w)) {
      ref.color = w == "grey" ? "gray" : w;
    } else if (++unknown > 3) {
      return std::nullopt;
    } else {
      last_unknown = w;
    }
    ++i;
  }
  // "the ladder": a determined phrase naming something outside the lexicon
  // still refers, and fails at binding.
  if (!noun && determined && unknown == 1 && std::isalpha(static_cast<unsigned char>(last_unknown.front()))) {
    noun = last_unknown;
  }
  if (!noun) return std::nullopt;
  ref.shape = *noun;

  // Post-nominal side descriptor.
  if ((match(t, i, {"on", "the", "left"}) || match(t, i, {"on", "the", "right"})) &&
      !(i + 3 < t.size() && t[i + 3].text == "of")) {
    ref.side = t[i + 2].text == "left" ? SideDescriptor::Left : SideDescriptor::Right;
    i += 3;
    if (i < t.size() && t[i].text == "side") ++i;
  }
  np.end = i;

  if (!partitive && (plural || count >= 0)) {
    const int n = count > 0 ? count : 2;
    for (int k = 1; k <= n; ++k) {
      ObjectRef r = ref;
      r.determiner = Determiner::Definite;
      r.ordinal = k;
      np.refs.push_back(r);
    }
  } else {
    np.refs.push_back(ref);
  }
  return np;
}

bool is_list_break(const Tokens& t, std::size_t i) {
  return i < t.size() && (t[i].text == "," || t[i].text == "and");
}

// Comma/"and"-separated noun phrases starting at i.
std::vector<ObjectRef> parse_np_list(const Tokens& t, std::size_t& i, bool& ground, bool& failed) {
  std::vector<ObjectRef> out;
  ground = false;
  failed = false;
  while (i < t.size()) {
    auto np = parse_np(t, i);
    if (!np) {
      failed = out.empty();
      break;
    }
    if (np->ground) ground = true;
    out.insert(out.end(), np->refs.begin(), np->refs.end());
    i = np->end;
    std::size_t k = i;
    while (is_list_break(t, k)) ++k;
    if (k == i || k >= t.size()) break;
    if (!parse_np(t, k)) break;
    i = k;
  }
  return out;
}

// Skips words up to the next frame keyword; stops at the end.
std::size_t next_frame(const Tokens& t, std::size_t i) {
  while (i < t.size() && frame_at(t, i).kind == FrameKind::None) ++i;
  return i;
}

// ---------------------------------------------------------------- clauses

std::vector<Action> chain(const std::vector<ObjectRef>& refs, const OrientationRef& o) {
  std::vector<Action> out;
  for (std::size_t k = 1; k < refs.size(); ++k) out.push_back(PlaceOn{refs[k], refs[k - 1], o});
  return out;
}

std::optional<std::vector<Action>> parse_tokens(Tokens t, const std::vector<Vec3>& coords) {
  const OrientationRef orientation = extract_orientation(t);

  std::size_t v = 0;
  while (v < t.size() && !is_verb_at(t, v)) ++v;
  if (v == t.size()) return std::nullopt;
  const std::string verb = verb_forms().find(t[v].text)->second;

  // Climbing.
  if (verb == "climb" || verb == "jump" ||
      (verb == "stand" && v + 1 < t.size() &&
       (t[v + 1].text == "on" || t[v + 1].text == "onto" || t[v + 1].text == "atop" || t[v + 1].text == "upon"))) {
    std::size_t i = v + 1;
    if (i < t.size() && t[i].text == "up") ++i;
    for (std::initializer_list<std::string_view> lead :
         {std::initializer_list<std::string_view>{"on", "top", "of"}, {"onto", "the", "top", "of"},
          {"to", "the", "top", "of"}, {"on", "the", "top", "of"}, {"onto"}, {"on"}, {"atop"}, {"upon"},
          {"to"}, {"into"}}) {
      if (match(t, i, lead)) {
        i += lead.size();
        break;
      }
    }
    auto np = parse_np(t, i);
    if (!np || np->ground || np->refs.size() != 1 || np->refs[0].group) return std::nullopt;
    return std::vector<Action>{Climb{np->refs[0]}};
  }

  // Movers: the passive subject, or the phrase after the verb.
  std::vector<ObjectRef> movers;
  std::size_t i = v + 1;
  bool ground = false;
  bool failed = false;
  if (v > 0 && kAux.count(t[v - 1].text)) {
    std::size_t end = v - 1;
    while (end > 0 && kModals.count(t[end - 1].text)) --end;
    Tokens subject(t.begin(), t.begin() + static_cast<long>(end));
    std::size_t s = 0;
    while (s < subject.size() && kLeadIns.count(subject[s].text)) ++s;
    movers = parse_np_list(subject, s, ground, failed);
  } else {
    movers = parse_np_list(t, i, ground, failed);
  }
  if (movers.empty() || ground) return std::nullopt;
  for (const ObjectRef& m : movers) {
    if (m.group) return std::nullopt;
  }

  i = next_frame(t, i);
  const FrameMatch frame = frame_at(t, i);
  std::vector<Action> out;
  auto anchor = [&](std::size_t at) -> std::optional<NounPhrase> {
    auto np = parse_np(t, at);
    if (!np || np->refs.empty()) {
      if (np && np->ground) return np;
      return std::nullopt;
    }
    return np;
  };
  auto single = [](const NounPhrase& np) {
    if (np.refs.size() == 1) return np.refs[0];
    ObjectRef g = np.refs[0];
    g.group = true;
    g.ordinal = 0;
    g.color.clear();
    g.size = SizeDescriptor::None;
    g.side = SideDescriptor::None;
    return g;
  };

  switch (frame.kind) {
    case FrameKind::Chain:
      if (movers.size() < 2) return std::nullopt;
      return chain(movers, orientation);
    case FrameKind::On: {
      auto np = anchor(i + frame.length);
      if (!np) return std::nullopt;
      if (np->ground) {
        for (const auto& m : movers) out.push_back(PlaceAt{m, Region{RegionKind::Ground, std::nullopt, Vec3::Zero()}, orientation});
        return out;
      }
      const ObjectRef base = single(*np);
      if (verb == "stack" && movers.size() > 1) {
        out.push_back(PlaceOn{movers[0], base, orientation});
        for (auto& a : chain(movers, orientation)) out.push_back(std::move(a));
        return out;
      }
      for (const auto& m : movers) out.push_back(PlaceOn{m, base, orientation});
      return out;
    }
    case FrameKind::NextTo:
    case FrameKind::InFrontOf:
    case FrameKind::Behind:
    case FrameKind::SameAs: {
      auto np = anchor(i + frame.length);
      if (!np || np->ground) return std::nullopt;
      const RegionKind kind = frame.kind == FrameKind::NextTo      ? RegionKind::NextTo
                              : frame.kind == FrameKind::InFrontOf ? RegionKind::InFrontOf
                              : frame.kind == FrameKind::Behind    ? RegionKind::Behind
                                                                   : RegionKind::SameAs;
      for (const auto& m : movers) out.push_back(PlaceAt{m, Region{kind, single(*np), Vec3::Zero()}, orientation});
      return out;
    }
    case FrameKind::Coordinates: {
      std::size_t index = 0;
      for (std::size_t k = 0; k < i + frame.length; ++k) index += t[k].text == "@coords" ? 1 : 0;
      if (index == 0 || index > coords.size()) return std::nullopt;
      for (const auto& m : movers) {
        out.push_back(PlaceAt{m, Region{RegionKind::Coordinates, std::nullopt, coords[index - 1]}, orientation});
      }
      return out;
    }
    case FrameKind::None:
    case FrameKind::Stop:
      break;
  }

  if (verb == "stack" && movers.size() > 1) return chain(movers, orientation);
  OrientationRef o = orientation;
  if (o.kind == OrientationKind::Keep && verb == "stand") o.kind = OrientationKind::Upright;
  if (o.kind == OrientationKind::Keep && verb == "lay") o.kind = OrientationKind::OnSide;
  if (o.kind == OrientationKind::Keep && verb != "rotate") return std::nullopt;
  for (const auto& m : movers) out.push_back(Rotate{m, o});
  return out;
}

std::vector<Action> parse_clause(const std::string& clause) {
  static const std::regex kCoords(
      R"(\(\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*,\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*,\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\))");
  std::vector<Vec3> coords;
  std::string text;
  auto begin = std::sregex_iterator(clause.begin(), clause.end(), kCoords);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    coords.emplace_back(std::stod(m[1].str()), std::stod(m[2].str()), std::stod(m[3].str()));
    text += clause.substr(last, static_cast<std::size_t>(m.position(0)) - last) + " @coords ";
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
  }
  text += clause.substr(last);

  auto actions = parse_tokens(tokenize(text), coords);
  if (!actions || actions->empty()) return {Ignore{clause}};
  return *actions;
}

}  // namespace

std::string verb_base(std::string_view word) {
  auto it = verb_forms().find(lower(word));
  return it == verb_forms().end() ? std::string() : it->second;
}

std::vector<std::string> split_sentences(std::string_view text) {
  static const std::regex kMarker(R"(^\s*(?:\d+[.)]|\(\d+\)|[-*]|\xE2\x80\xA2)\s+)");
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_search(line, m, kMarker)) line = line.substr(static_cast<std::size_t>(m.length(0)));

    std::size_t start = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (std::string_view(".!?;:").find(c) == std::string_view::npos) continue;
      if (i + 1 < line.size() && !std::isspace(static_cast<unsigned char>(line[i + 1]))) continue;
      std::string sentence = trim(std::string_view(line).substr(start, i + 1 - start));
      start = i + 1;
      if (std::any_of(sentence.begin(), sentence.end(), [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)); })) {
        out.push_back(std::move(sentence));
      }
    }
    std::string rest = trim(std::string_view(line).substr(std::min(start, line.size())));
    if (std::any_of(rest.begin(), rest.end(), [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)); })) {
      out.push_back(std::move(rest));
    }
    if (nl == text.size()) break;
  }
  return out;
}

std::vector<std::string> split_clauses(std::string_view sentence) {
  const Tokens t = tokenize(sentence);
  std::vector<std::size_t> cuts;    // byte offsets where a clause ends
  std::vector<std::size_t> starts;  // byte offsets where the next clause begins
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].text != "," && t[i].text != "then" && t[i].text != "and") continue;
    std::size_t k = i;
    while (k < t.size() && (t[k].text == "," || t[k].text == "then" || t[k].text == "and")) ++k;
    if (k < t.size() && k > 0 && is_base_verb(t[k].text) && (k + 1 >= t.size() || t[k + 1].text != "of")) {
      if (i > 0) {
        cuts.push_back(t[i].begin);
        starts.push_back(t[k].begin);
      }
      i = k;
    }
  }
  std::vector<std::string> out;
  std::size_t begin = 0;
  auto emit = [&](std::size_t b, std::size_t e) {
    std::string clause = trim(sentence.substr(b, e - b));
    while (!clause.empty() && (clause.back() == ',')) clause = trim(clause.substr(0, clause.size() - 1));
    if (!clause.empty()) out.push_back(std::move(clause));
  };
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    emit(begin, cuts[c]);
    begin = starts[c];
  }
  emit(begin, sentence.size());
  return out;
}

Plan parse(std::string_view text) {
  Plan plan;
  for (const std::string& sentence : split_sentences(text)) {
    for (const std::string& clause : split_clauses(sentence)) {
      for (Action& a : parse_clause(clause)) plan.steps.push_back(std::move(a));
    }
  }
  return plan;
}

}  // namespace stackeval
