#include "sepmark/features.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

#include "sepmark/codec.hpp"
#include "sepmark/error.hpp"
#include "sepmark/util.hpp"

namespace sepmark {
namespace {

const std::string kBegin = "<BEGIN>";
const std::string kEnd = "<END>";
const std::string kUnkCluster = "UNK";

std::string offset_tag(int d) {
  if (d > 0) return "[+" + std::to_string(d) + "]";
  return "[" + std::to_string(d) + "]";
}

std::string range_tag(int a, int b) {
  auto signed_str = [](int d) {
    return d > 0 ? "+" + std::to_string(d) : std::to_string(d);
  };
  return "[" + signed_str(a) + ":" + signed_str(b) + "]";
}

const std::string& word_at(const Sentence& s, int k) {
  if (k < 0) return kBegin;
  if (k >= s.size()) return kEnd;
  return s.tokens[static_cast<std::size_t>(k)].surface;
}

const std::string& pos_at(const Sentence& s, int k) {
  if (k < 0) return kBegin;
  if (k >= s.size()) return kEnd;
  return s.tokens[static_cast<std::size_t>(k)].pos;
}

std::string cluster_prefix(const std::string& bits, std::size_t len) {
  return bits.substr(0, std::min(len, bits.size()));
}

void orthographic_features(const std::string& w, std::vector<std::string>& out) {
  bool all_upper = !w.empty();
  bool all_digit = !w.empty();
  bool has_digit = false, has_hyphen = false, has_punct = false;
  for (const char c : w) {
    const auto u = static_cast<unsigned char>(c);
    if (!std::isupper(u)) all_upper = false;
    if (std::isdigit(u)) has_digit = true;
    else all_digit = false;
    if (c == '-') has_hyphen = true;
    if (std::ispunct(u)) has_punct = true;
  }
  if (all_upper) out.push_back("ORTH=allCaps");
  if (!w.empty() && std::isupper(static_cast<unsigned char>(w[0]))) {
    out.push_back("ORTH=initCap");
  }
  if (has_digit) out.push_back("ORTH=hasDigit");
  if (has_hyphen) out.push_back("ORTH=hasHyphen");
  if (all_digit) out.push_back("ORTH=allDigits");
  if (has_punct) out.push_back("ORTH=hasPunct");
}

}  // namespace

FeatureConfig FeatureConfig::preset(std::string_view name) {
  FeatureConfig cfg;
  cfg.ngram_max = 4;
  cfg.bow_window = 5;
  if (name == "ace") {
    cfg.word_window = 3;
    cfg.pos_window = 3;
    cfg.orthographic = true;
  } else if (name == "genia") {
    cfg.word_window = 2;
    cfg.pos_window = 2;
    cfg.shape_window = 0;
    cfg.affix_max = 6;
    cfg.brown = true;
  } else if (name == "conll") {
    cfg.word_window = 2;
    cfg.pos_window = 2;
    cfg.shape_window = 2;
    cfg.affix_max = 5;
    cfg.orthographic = true;
  } else {
    throw DataError("unknown feature preset: " + std::string(name));
  }
  return cfg;
}

FeatureConfig parse_feature_config(std::istream& in) {
  FeatureConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const auto where = [&] {
      return "feature config line " + std::to_string(line_no);
    };
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw DataError(where() + ": expected key = value, got '" +
                      std::string(text) + "'");
    }
    const std::string key{trim(text.substr(0, eq))};
    const std::string value{trim(text.substr(eq + 1))};
    auto int_value = [&] {
      int v = 0;
      const char* end = value.data() + value.size();
      const auto [p, ec] = std::from_chars(value.data(), end, v);
      if (ec != std::errc() || p != end) {
        throw DataError(where() + ": bad integer '" + value + "'");
      }
      return v;
    };
    auto bool_value = [&] {
      if (value == "on" || value == "true" || value == "1") return true;
      if (value == "off" || value == "false" || value == "0") return false;
      throw DataError(where() + ": bad flag '" + value + "'");
    };
    if (key == "preset") {
      try {
        cfg = FeatureConfig::preset(value);
      } catch (const DataError&) {
        throw DataError(where() + ": unknown preset '" + value + "'");
      }
    } else if (key == "word_window") {
      cfg.word_window = int_value();
    } else if (key == "pos_window") {
      cfg.pos_window = int_value();
    } else if (key == "ngram_max") {
      cfg.ngram_max = int_value();
    } else if (key == "bow_window") {
      cfg.bow_window = int_value();
    } else if (key == "shape_window") {
      cfg.shape_window = int_value();
    } else if (key == "affix_max") {
      cfg.affix_max = int_value();
    } else if (key == "orthographic") {
      cfg.orthographic = bool_value();
    } else if (key == "brown") {
      cfg.brown = bool_value();
    } else {
      throw DataError(where() + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

FeatureConfig resolve_feature_config(const std::string& name_or_path) {
  if (name_or_path == "ace" || name_or_path == "genia" ||
      name_or_path == "conll") {
    return FeatureConfig::preset(name_or_path);
  }
  std::ifstream in(name_or_path);
  if (!in) throw DataError("cannot open feature config: " + name_or_path);
  return parse_feature_config(in);
}

const std::string& BrownClusterMap::cluster_of(const std::string& word) const {
  const auto it = clusters.find(word);
  return it == clusters.end() ? kUnkCluster : it->second;
}

BrownClusterMap load_brown_clusters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open cluster file: " + path);
  BrownClusterMap map;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError("cluster file line " + std::to_string(line_no) + " in " +
                      path + ": expected bitstring<TAB>word");
    }
    map.clusters[std::string(fields[1])] = std::string(fields[0]);
  }
  return map;
}

std::string word_shape(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (const char c : word) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isupper(u)) out += 'A';
    else if (std::islower(u)) out += 'a';
    else if (std::isdigit(u)) out += '0';
    else out += c;
  }
  return out;
}

std::string compressed_word_shape(std::string_view word) {
  std::string out;
  for (const char c : word_shape(word)) {
    if (out.empty() || out.back() != c) out += c;
  }
  return out;
}

std::optional<std::uint32_t> FeatureDictionary::lookup(
    const std::string& text) const {
  const auto it = index_.find(text);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t FeatureDictionary::intern(const std::string& text) {
  if (const auto it = index_.find(text); it != index_.end()) return it->second;
  if (frozen_) {
    throw DataError("cannot intern into a frozen feature dictionary: " + text);
  }
  const auto id = static_cast<std::uint32_t>(strings_.size()) + 1;
  index_.emplace(text, id);
  strings_.push_back(text);
  return id;
}

std::vector<std::string> input_features(const Sentence& sentence, int k,
                                        const FeatureConfig& config,
                                        const BrownClusterMap* brown) {
  std::vector<std::string> out;
  const int n = sentence.size();

  for (int d = -config.word_window; d <= config.word_window; ++d) {
    out.push_back("W" + offset_tag(d) + "=" + word_at(sentence, k + d));
  }
  for (int d = -config.pos_window; d <= config.pos_window; ++d) {
    out.push_back("P" + offset_tag(d) + "=" + pos_at(sentence, k + d));
  }

  for (int len = 2; len <= config.ngram_max; ++len) {
    for (int s = k - len + 1; s <= k; ++s) {
      std::string words, tags;
      for (int i = 0; i < len; ++i) {
        if (i > 0) {
          words += '_';
          tags += '_';
        }
        words += word_at(sentence, s + i);
        tags += pos_at(sentence, s + i);
      }
      const std::string tag = range_tag(s - k, s + len - 1 - k);
      out.push_back("NGW" + tag + "=" + words);
      out.push_back("NGP" + tag + "=" + tags);
    }
  }

  for (int d = -config.bow_window; d <= config.bow_window; ++d) {
    const int j = k + d;
    if (j < 0 || j >= n) continue;
    out.push_back("BOW=" + sentence.tokens[static_cast<std::size_t>(j)].surface);
  }

  for (int d = -config.shape_window; d <= config.shape_window; ++d) {
    const bool in_range = k + d >= 0 && k + d < n;
    const std::string& w = word_at(sentence, k + d);
    out.push_back("SH" + offset_tag(d) + "=" + (in_range ? word_shape(w) : w));
    out.push_back("SHC" + offset_tag(d) + "=" +
                  (in_range ? compressed_word_shape(w) : w));
  }

  if (config.affix_max > 0) {
    const std::string& w = word_at(sentence, k);
    const int top = std::min<int>(config.affix_max, static_cast<int>(w.size()));
    for (int len = 1; len <= top; ++len) {
      const auto l = static_cast<std::size_t>(len);
      out.push_back("PRE[" + std::to_string(len) + "]=" + w.substr(0, l));
      out.push_back("SUF[" + std::to_string(len) + "]=" + w.substr(w.size() - l));
    }
  }

  if (config.orthographic) orthographic_features(word_at(sentence, k), out);

  if (config.brown && brown != nullptr) {
    for (int d = -1; d <= 1; ++d) {
      const int j = k + d;
      if (j < 0 || j >= n) continue;
      const std::string& bits =
          brown->cluster_of(sentence.tokens[static_cast<std::size_t>(j)].surface);
      out.push_back("BR" + offset_tag(d) + "=" + bits);
      out.push_back("BRP4" + offset_tag(d) + "=" + cluster_prefix(bits, 4));
      out.push_back("BRP6" + offset_tag(d) + "=" + cluster_prefix(bits, 6));
    }
  }

  return out;
}

std::vector<std::string> gap_features(const Sentence& sentence, int gap,
                                      const FeatureConfig& config,
                                      const BrownClusterMap* brown) {
  std::vector<std::string> out;
  if (gap == 0) {
    out.push_back("GL|W[0]=" + kBegin);
  } else {
    for (const std::string& s : input_features(sentence, gap - 1, config, brown)) {
      out.push_back("GL|" + s);
    }
  }
  if (gap == sentence.size()) {
    out.push_back("GR|W[0]=" + kEnd);
  } else {
    for (const std::string& s : input_features(sentence, gap, config, brown)) {
      out.push_back("GR|" + s);
    }
  }
  return out;
}

namespace {

enum class Anchor { kBare, kWord, kGap };

struct EdgeRole {
  Anchor anchor = Anchor::kBare;
  int pos = 0;
  std::string descriptor;
};

constexpr std::string_view kTagLetters = "OBILU";

std::string tag_name(const Network& net, const Node& node) {
  const int sub = node.sub;
  if (net.scheme == ModelScheme::LcrfMulti || sub == 0) {
    return std::string(1, kTagLetters[static_cast<std::size_t>(sub)]);
  }
  std::string out(1, kTagLetters[static_cast<std::size_t>((sub - 1) % 4 + 1)]);
  out += '-';
  out += net.labels[static_cast<std::size_t>((sub - 1) / 4)];
  return out;
}

std::string chain_suffix(const Network& net, int type) {
  if (type < 0) return {};
  return "#chain=" + net.labels[static_cast<std::size_t>(type)];
}

std::string separator_name(int sub) {
  return std::string(codec::name(static_cast<codec::Separator>(sub)));
}

EdgeRole edge_role(const Network& net, const Edge& e) {
  const Node& parent = net.nodes[e.parent];
  const Node& head = net.nodes[net.children(e)[0]];
  if (parent.kind == NodeKind::Root && head.kind == NodeKind::ChainStart) {
    return {Anchor::kBare, 0, "join"};
  }
  switch (net.scheme) {
    case ModelScheme::Edge: {
      const int gap = head.kind == NodeKind::Leaf ? net.n_tokens : head.pos;
      return {Anchor::kGap, gap,
              "label=" + separator_name(e.label) + chain_suffix(net, e.type)};
    }
    case ModelScheme::State: {
      const std::string prev =
          parent.kind == NodeKind::SepState ? separator_name(parent.sub) : "^";
      if (head.kind == NodeKind::Leaf) {
        return {Anchor::kBare, 0, "st=" + prev + ">$" + chain_suffix(net, e.type)};
      }
      return {Anchor::kGap, head.pos,
              "st=" + prev + ">" + separator_name(head.sub) +
                  chain_suffix(net, e.type)};
    }
    case ModelScheme::LcrfSingle:
    case ModelScheme::LcrfMulti: {
      const std::string prev =
          parent.kind == NodeKind::BilouState ? tag_name(net, parent) : "^";
      if (head.kind == NodeKind::Leaf) {
        return {Anchor::kBare, 0, "tag=" + prev + ">$" + chain_suffix(net, e.type)};
      }
      return {Anchor::kWord, head.pos,
              "tag=" + prev + ">" + tag_name(net, head) + chain_suffix(net, e.type)};
    }
    case ModelScheme::Hypergraph: {
      static constexpr std::string_view kRoles[] = {"", "T>X", "T>I",
                                                    "I>X", "I>I", "I>IX"};
      if (e.label != kHgScaffold) {
        return {Anchor::kWord, parent.pos,
                "he=" + std::string(kRoles[e.label]) + chain_suffix(net, e.type)};
      }
      if (parent.kind == NodeKind::HgA) {
        return {Anchor::kBare, 0,
                net.children(e).size() == 2 ? "he=A>AE" : "he=A>E"};
      }
      return {Anchor::kBare, 0, "he=E>T"};
    }
  }
  return {};
}

}  // namespace

std::vector<std::string> edge_feature_strings(const Network& network,
                                              std::uint32_t edge,
                                              const FeatureConfig& config,
                                              const BrownClusterMap* brown) {
  const EdgeRole role = edge_role(network, network.edges[edge]);
  if (role.anchor == Anchor::kBare) return {role.descriptor};
  const std::vector<std::string> anchored =
      role.anchor == Anchor::kWord
          ? input_features(*network.sentence, role.pos, config, brown)
          : gap_features(*network.sentence, role.pos, config, brown);
  std::vector<std::string> out;
  out.reserve(anchored.size());
  for (const std::string& s : anchored) {
    out.push_back(s + "#" + role.descriptor);
  }
  return out;
}

namespace {

SparseFeatureVector pack_ids(std::vector<std::uint32_t> ids) {
  std::sort(ids.begin(), ids.end());
  SparseFeatureVector out;
  for (const std::uint32_t id : ids) {
    if (!out.empty() && out.back().first == id) {
      ++out.back().second;
    } else {
      out.emplace_back(id, 1);
    }
  }
  return out;
}

}  // namespace

SparseFeatureVector edge_features(const Network& network, std::uint32_t edge,
                                  FeatureDictionary& dictionary,
                                  const FeatureConfig& config,
                                  const BrownClusterMap* brown) {
  std::vector<std::uint32_t> ids;
  if (network.edges[edge].penalty) ids.push_back(kPenaltyFeature);
  for (const std::string& s : edge_feature_strings(network, edge, config, brown)) {
    if (dictionary.frozen()) {
      if (const auto id = dictionary.lookup(s)) ids.push_back(*id);
    } else {
      ids.push_back(dictionary.intern(s));
    }
  }
  return pack_ids(std::move(ids));
}

SparseFeatureVector edge_features(const Network& network, std::uint32_t edge,
                                  const FeatureDictionary& dictionary,
                                  const FeatureConfig& config,
                                  const BrownClusterMap* brown) {
  std::vector<std::uint32_t> ids;
  if (network.edges[edge].penalty) ids.push_back(kPenaltyFeature);
  for (const std::string& s : edge_feature_strings(network, edge, config, brown)) {
    if (const auto id = dictionary.lookup(s)) ids.push_back(*id);
  }
  return pack_ids(std::move(ids));
}

FeatureDictionary build_dictionary(const Corpus& corpus, ModelScheme scheme,
                                   const FeatureConfig& config,
                                   const BrownClusterMap* brown) {
  FeatureDictionary dictionary;
  for (const Sentence& sentence : corpus.sentences) {
    const Network net = build_network(scheme, sentence, corpus.label_set);
    for (std::uint32_t e = 0; e < net.num_edges(); ++e) {
      for (const std::string& s : edge_feature_strings(net, e, config, brown)) {
        dictionary.intern(s);
      }
    }
  }
  dictionary.freeze();
  return dictionary;
}

}  // namespace sepmark
