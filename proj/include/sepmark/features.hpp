#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sepmark/corpus.hpp"
#include "sepmark/network.hpp"

namespace sepmark {

// Which observation templates fire at a word. Window fields give the span of
// relative offsets (2 means -2..+2); -1 disables a windowed template, 0 keeps
// only the current word. ngram_max 0 or 1 and affix_max 0 disable those.
struct FeatureConfig {
  int word_window = -1;
  int pos_window = -1;
  int ngram_max = 0;    // word/POS n-grams up to this length, always >= 2
  int bow_window = -1;  // unordered surface bag, out-of-range skipped
  int shape_window = -1;
  int affix_max = 0;    // prefixes/suffixes up to this length
  bool orthographic = false;
  bool brown = false;  // needs a cluster map at extraction time

  // "ace", "genia" or "conll"; throws DataError otherwise.
  static FeatureConfig preset(std::string_view name);

  bool operator==(const FeatureConfig&) const = default;
};

// Key-value text, one "key = value" per line, '#' comments. "preset" resets
// every field; later keys override. Throws DataError with the line number.
FeatureConfig parse_feature_config(std::istream& in);

// Accepts a preset name or a path to a config file.
FeatureConfig resolve_feature_config(const std::string& name_or_path);

// Word -> Brown cluster bit-string. Absent words map to the "UNK" cluster.
struct BrownClusterMap {
  std::unordered_map<std::string, std::string> clusters;

  const std::string& cluster_of(const std::string& word) const;
  std::size_t size() const { return clusters.size(); }
};

// Tab-separated "bitstring<TAB>word[<TAB>freq]" lines.
BrownClusterMap load_brown_clusters(const std::string& path);

// Uppercase -> 'A', lowercase -> 'a', digit -> '0', anything else verbatim;
// the compressed variant collapses runs of the same shape character.
std::string word_shape(std::string_view word);
std::string compressed_word_shape(std::string_view word);

// Grows while unfrozen, then becomes a read-only lookup table. Index 0 is
// reserved for the shared mention penalty and never maps to a string;
// strings()[i] holds the string of index i + 1.
class FeatureDictionary {
 public:
  std::uint32_t size() const {
    return static_cast<std::uint32_t>(strings_.size()) + 1;
  }
  bool frozen() const { return frozen_; }
  void freeze() { frozen_ = true; }

  std::optional<std::uint32_t> lookup(const std::string& text) const;
  std::uint32_t intern(const std::string& text);  // DataError when frozen

  const std::vector<std::string>& strings() const { return strings_; }

  bool operator==(const FeatureDictionary& other) const {
    return frozen_ == other.frozen_ && strings_ == other.strings_;
  }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> strings_;
  bool frozen_ = false;
};

inline constexpr std::uint32_t kPenaltyFeature = 0;

// Sorted by index, counts >= 1.
using SparseFeatureVector = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

// Observation strings at word k, "name=value" with no whitespace. Positions
// outside the sentence read as <BEGIN>/<END> in windowed templates and are
// skipped by the bag and cluster templates.
std::vector<std::string> input_features(const Sentence& sentence, int k,
                                        const FeatureConfig& config,
                                        const BrownClusterMap* brown = nullptr);

// Observation strings at a gap: the left flanking word's features under
// "GL|" and the right's under "GR|", with a bare sentinel at each boundary.
std::vector<std::string> gap_features(const Sentence& sentence, int gap,
                                      const FeatureConfig& config,
                                      const BrownClusterMap* brown = nullptr);

// Every feature string of one edge: each anchored observation string joined
// with the edge's output descriptor by '#'. Chain-stop, scaffolding and
// junction edges carry just their descriptor.
std::vector<std::string> edge_feature_strings(
    const Network& network, std::uint32_t edge, const FeatureConfig& config,
    const BrownClusterMap* brown = nullptr);

// Resolves the strings through the dictionary (interning while unfrozen,
// silently dropping unseen strings once frozen) and prepends the penalty
// index on penalty-marked edges.
SparseFeatureVector edge_features(const Network& network, std::uint32_t edge,
                                  FeatureDictionary& dictionary,
                                  const FeatureConfig& config,
                                  const BrownClusterMap* brown = nullptr);

// Lookup-only variant; never interns, frozen or not.
SparseFeatureVector edge_features(const Network& network, std::uint32_t edge,
                                  const FeatureDictionary& dictionary,
                                  const FeatureConfig& config,
                                  const BrownClusterMap* brown = nullptr);

// Indexes the union of features over all edges of all training networks
// (competitor edges need weights too, not just gold ones), then freezes.
FeatureDictionary build_dictionary(const Corpus& corpus, ModelScheme scheme,
                                   const FeatureConfig& config,
                                   const BrownClusterMap* brown = nullptr);

}  // namespace sepmark
