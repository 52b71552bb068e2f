#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sepmark {

struct Token {
  std::string surface;
  std::string pos = "-";

  bool operator==(const Token&) const = default;
};

// A labeled [start, end] word span, 0-based and inclusive.
struct Mention {
  int start = 0;
  int end = 0;
  std::string label;

  auto operator<=>(const Mention&) const = default;
};

struct Sentence {
  std::string id;
  std::vector<Token> tokens;
  std::vector<Mention> mentions;  // kept sorted and duplicate-free

  int size() const { return static_cast<int>(tokens.size()); }
  void add_mention(Mention m);
  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::vector<Sentence> sentences;
  std::vector<std::string> label_set;  // sorted, unique; defines type indices

  void rebuild_label_set();
  int type_index(const std::string& label) const;  // -1 when unknown
  std::int64_t word_count() const;
  bool operator==(const Corpus&) const = default;
};

struct CorpusStats {
  std::int64_t num_sentences = 0;
  std::int64_t num_sentences_with_overlap = 0;
  std::int64_t num_mentions = 0;
  std::int64_t num_overlapping_mentions = 0;
  std::int64_t num_same_type_overlapping_mentions = 0;

  bool operator==(const CorpusStats&) const = default;
};

bool mentions_overlap(const Mention& a, const Mention& b);  // share >= 1 word

// The line-oriented corpus format used throughout: each sentence is three
// lines followed by a blank line.
//
//   the<TAB>human<TAB>TCF-1<TAB>protein
//   DT<TAB>NN<TAB>NN<TAB>NN
//   1,3,PROT;2,2,PROT
//
// The third line lists "start,end,LABEL" entries joined by ';' and is empty
// for sentences without mentions. Sentence ids are assigned by position.
Corpus parse_olner(std::istream& in);
Corpus parse_olner_text(const std::string& text);
void write_olner(const Corpus& corpus, std::ostream& out);
std::string write_olner_text(const Corpus& corpus);

// Column format "surface pos chunk netag" with BIO or BILOU entity tags and
// blank lines between sentences. The chunk column is not modeled. A dangling
// I- tag (no preceding mention of that type) is repaired as B- and logged.
Corpus parse_conll(std::istream& in);
Corpus parse_conll_text(const std::string& text);

// Canonical writer for the column format: BILOU tags, "-" chunk column.
// Overlapping mentions cannot be written; a DataError names the pair.
void write_conll(const Corpus& corpus, std::ostream& out);
std::string write_conll_text(const Corpus& corpus);

enum class CorpusFormat { Olner, Conll };

// Reads a corpus file (gzip accepted when the name ends in ".gz").
Corpus read_corpus_file(const std::string& path, CorpusFormat format);
void write_corpus_file(const Corpus& corpus, const std::string& path,
                       CorpusFormat format);

CorpusStats compute_stats(const Corpus& corpus);
std::string render_stats(const CorpusStats& stats);

// Splits into (sentences with at least one pair of overlapping mentions,
// all remaining sentences). Both halves keep the full label set.
std::pair<Corpus, Corpus> split_by_overlap(const Corpus& corpus);

}  // namespace sepmark
