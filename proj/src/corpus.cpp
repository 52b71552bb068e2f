#include "sepmark/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "sepmark/error.hpp"
#include "sepmark/gzio.hpp"
#include "sepmark/log.hpp"
#include "sepmark/util.hpp"

namespace sepmark {

namespace {

int parse_int(std::string_view text, int line_no, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("malformed " + std::string(what) + " '" + std::string(text) +
                    "' at line " + std::to_string(line_no));
  }
  return value;
}

void check_token_text(std::string_view text, int line_no) {
  if (text.empty()) {
    throw DataError("empty token at line " + std::to_string(line_no));
  }
  if (text.find('\t') != std::string_view::npos ||
      text.find('\n') != std::string_view::npos) {
    throw DataError("token contains tab or newline at line " +
                    std::to_string(line_no));
  }
}

std::vector<Mention> parse_mention_field(std::string_view field, int n_tokens,
                                         int line_no) {
  std::vector<Mention> mentions;
  if (trim(field).empty()) return mentions;
  for (std::string_view entry : split(field, ';')) {
    auto parts = split(entry, ',');
    if (parts.size() != 3) {
      throw DataError("malformed mention '" + std::string(entry) +
                      "' at line " + std::to_string(line_no));
    }
    Mention m;
    m.start = parse_int(parts[0], line_no, "mention start");
    m.end = parse_int(parts[1], line_no, "mention end");
    m.label = std::string(trim(parts[2]));
    if (m.label.empty()) {
      throw DataError("empty mention label at line " + std::to_string(line_no));
    }
    if (m.end < m.start) {
      throw DataError("mention end < start at line " + std::to_string(line_no));
    }
    if (m.start < 0 || m.end >= n_tokens) {
      throw DataError("mention span out of range at line " +
                      std::to_string(line_no));
    }
    mentions.push_back(std::move(m));
  }
  return mentions;
}

struct ConllRun {
  int start = -1;
  std::string label;
  bool open() const { return start >= 0; }
};

}  // namespace

void Sentence::add_mention(Mention m) {
  auto it = std::lower_bound(mentions.begin(), mentions.end(), m);
  if (it != mentions.end() && *it == m) return;  // duplicates collapse
  mentions.insert(it, std::move(m));
}

void Corpus::rebuild_label_set() {
  std::set<std::string> labels(label_set.begin(), label_set.end());
  for (const Sentence& s : sentences) {
    for (const Mention& m : s.mentions) labels.insert(m.label);
  }
  label_set.assign(labels.begin(), labels.end());
}

int Corpus::type_index(const std::string& label) const {
  auto it = std::lower_bound(label_set.begin(), label_set.end(), label);
  if (it == label_set.end() || *it != label) return -1;
  return static_cast<int>(it - label_set.begin());
}

std::int64_t Corpus::word_count() const {
  std::int64_t n = 0;
  for (const Sentence& s : sentences) n += s.size();
  return n;
}

bool mentions_overlap(const Mention& a, const Mention& b) {
  return a.start <= b.end && b.start <= a.end;
}

Corpus parse_olner(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);

  Corpus corpus;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (trim(lines[i]).empty()) {
      // Stray blank lines between sentences are rejected: the format is
      // exactly three lines plus one separator.
      bool rest_blank = true;
      for (std::size_t j = i; j < lines.size(); ++j) {
        if (!trim(lines[j]).empty()) {
          rest_blank = false;
          break;
        }
      }
      if (rest_blank) break;
      throw DataError("unexpected blank line " + std::to_string(i + 1));
    }
    if (i + 2 >= lines.size()) {
      throw DataError("incomplete sentence block at line " +
                      std::to_string(i + 1));
    }
    const int token_line = static_cast<int>(i) + 1;
    Sentence sentence;
    sentence.id = std::to_string(corpus.sentences.size());

    auto surfaces = split(lines[i], '\t');
    auto tags = split(lines[i + 1], '\t');
    if (surfaces.size() != tags.size()) {
      throw DataError("token/POS count mismatch at line " +
                      std::to_string(token_line + 1));
    }
    for (std::size_t k = 0; k < surfaces.size(); ++k) {
      check_token_text(surfaces[k], token_line);
      check_token_text(tags[k], token_line + 1);
      sentence.tokens.push_back(
          {std::string(surfaces[k]), std::string(tags[k])});
    }
    for (Mention& m : parse_mention_field(lines[i + 2], sentence.size(),
                                          token_line + 2)) {
      sentence.add_mention(std::move(m));
    }
    corpus.sentences.push_back(std::move(sentence));

    i += 3;
    if (i < lines.size()) {
      if (!trim(lines[i]).empty()) {
        throw DataError("expected blank line after sentence at line " +
                        std::to_string(i + 1));
      }
      ++i;
    }
  }
  corpus.rebuild_label_set();
  return corpus;
}

Corpus parse_olner_text(const std::string& text) {
  std::istringstream in(text);
  return parse_olner(in);
}

void write_olner(const Corpus& corpus, std::ostream& out) {
  for (const Sentence& s : corpus.sentences) {
    for (int k = 0; k < s.size(); ++k) {
      if (k > 0) out << '\t';
      out << s.tokens[static_cast<std::size_t>(k)].surface;
    }
    out << '\n';
    for (int k = 0; k < s.size(); ++k) {
      if (k > 0) out << '\t';
      out << s.tokens[static_cast<std::size_t>(k)].pos;
    }
    out << '\n';
    for (std::size_t m = 0; m < s.mentions.size(); ++m) {
      if (m > 0) out << ';';
      out << s.mentions[m].start << ',' << s.mentions[m].end << ','
          << s.mentions[m].label;
    }
    out << "\n\n";
  }
}

std::string write_olner_text(const Corpus& corpus) {
  std::ostringstream out;
  write_olner(corpus, out);
  return out.str();
}

Corpus parse_conll(std::istream& in) {
  Corpus corpus;
  Sentence sentence;
  ConllRun run;
  int line_no = 0;
  std::string line;

  auto close_run = [&](int end) {
    if (!run.open()) return;
    sentence.add_mention({run.start, end, run.label});
    run = ConllRun{};
  };
  auto flush_sentence = [&]() {
    close_run(sentence.size() - 1);
    if (sentence.tokens.empty()) return;
    bool docstart = sentence.size() == 1 &&
                    sentence.tokens[0].surface == "-DOCSTART-";
    if (!docstart) {
      sentence.id = std::to_string(corpus.sentences.size());
      corpus.sentences.push_back(std::move(sentence));
    }
    sentence = Sentence{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    if (text.empty()) {
      flush_sentence();
      continue;
    }
    auto cols = split_whitespace(text);
    if (cols.size() != 4) {
      throw DataError("expected 4 columns at line " + std::to_string(line_no));
    }
    const int k = sentence.size();
    sentence.tokens.push_back({std::string(cols[0]), std::string(cols[1])});

    std::string_view tag = cols[3];
    if (tag == "O") {
      close_run(k - 1);
      continue;
    }
    if (tag.size() < 3 || tag[1] != '-' ||
        (tag[0] != 'B' && tag[0] != 'I' && tag[0] != 'L' && tag[0] != 'U')) {
      throw DataError("malformed entity tag '" + std::string(tag) +
                      "' at line " + std::to_string(line_no));
    }
    const char kind = tag[0];
    std::string label(tag.substr(2));
    switch (kind) {
      case 'B':
        close_run(k - 1);
        run = {k, std::move(label)};
        break;
      case 'U':
        close_run(k - 1);
        sentence.add_mention({k, k, std::move(label)});
        break;
      case 'I':
      case 'L':
        if (!run.open() || run.label != label) {
          log::warn("dangling ", std::string(1, kind), "-", label,
                    " at line ", line_no, ", treating as B-", label);
          close_run(k - 1);
          run = {k, std::move(label)};
        }
        if (kind == 'L') close_run(k);
        break;
    }
  }
  flush_sentence();
  corpus.rebuild_label_set();
  return corpus;
}

Corpus parse_conll_text(const std::string& text) {
  std::istringstream in(text);
  return parse_conll(in);
}

void write_conll(const Corpus& corpus, std::ostream& out) {
  for (const Sentence& s : corpus.sentences) {
    for (std::size_t i = 0; i < s.mentions.size(); ++i) {
      for (std::size_t j = i + 1; j < s.mentions.size(); ++j) {
        if (mentions_overlap(s.mentions[i], s.mentions[j])) {
          throw DataError("cannot write overlapping mentions (" +
                          std::to_string(s.mentions[i].start) + "," +
                          std::to_string(s.mentions[i].end) + "," +
                          s.mentions[i].label + ") and (" +
                          std::to_string(s.mentions[j].start) + "," +
                          std::to_string(s.mentions[j].end) + "," +
                          s.mentions[j].label + ") in column format");
        }
      }
    }
    std::vector<std::string> tags(static_cast<std::size_t>(s.size()), "O");
    for (const Mention& m : s.mentions) {
      if (m.start == m.end) {
        tags[static_cast<std::size_t>(m.start)] = "U-" + m.label;
        continue;
      }
      tags[static_cast<std::size_t>(m.start)] = "B-" + m.label;
      for (int k = m.start + 1; k < m.end; ++k) {
        tags[static_cast<std::size_t>(k)] = "I-" + m.label;
      }
      tags[static_cast<std::size_t>(m.end)] = "L-" + m.label;
    }
    for (int k = 0; k < s.size(); ++k) {
      const Token& t = s.tokens[static_cast<std::size_t>(k)];
      out << t.surface << ' ' << t.pos << " - "
          << tags[static_cast<std::size_t>(k)] << '\n';
    }
    out << '\n';
  }
}

std::string write_conll_text(const Corpus& corpus) {
  std::ostringstream out;
  write_conll(corpus, out);
  return out.str();
}

Corpus read_corpus_file(const std::string& path, CorpusFormat format) {
  const std::string text = read_file(path);
  try {
    return format == CorpusFormat::Olner ? parse_olner_text(text)
                                         : parse_conll_text(text);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_corpus_file(const Corpus& corpus, const std::string& path,
                       CorpusFormat format) {
  write_file(path, format == CorpusFormat::Olner ? write_olner_text(corpus)
                                                 : write_conll_text(corpus));
}

CorpusStats compute_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.num_sentences = static_cast<std::int64_t>(corpus.sentences.size());
  for (const Sentence& s : corpus.sentences) {
    stats.num_mentions += static_cast<std::int64_t>(s.mentions.size());
    bool sentence_overlap = false;
    for (std::size_t i = 0; i < s.mentions.size(); ++i) {
      bool any = false, same = false;
      for (std::size_t j = 0; j < s.mentions.size(); ++j) {
        if (i == j) continue;
        if (!mentions_overlap(s.mentions[i], s.mentions[j])) continue;
        any = true;
        same |= s.mentions[i].label == s.mentions[j].label;
      }
      if (any) {
        ++stats.num_overlapping_mentions;
        sentence_overlap = true;
      }
      if (same) ++stats.num_same_type_overlapping_mentions;
    }
    if (sentence_overlap) ++stats.num_sentences_with_overlap;
  }
  return stats;
}

std::string render_stats(const CorpusStats& stats) {
  std::ostringstream out;
  out << "sentences " << stats.num_sentences << '\n'
      << "sentences_with_overlap " << stats.num_sentences_with_overlap << '\n'
      << "mentions " << stats.num_mentions << '\n'
      << "overlapping_mentions " << stats.num_overlapping_mentions << '\n'
      << "same_type_overlapping_mentions "
      << stats.num_same_type_overlapping_mentions << '\n';
  return out.str();
}

std::pair<Corpus, Corpus> split_by_overlap(const Corpus& corpus) {
  Corpus with, without;
  with.label_set = corpus.label_set;
  without.label_set = corpus.label_set;
  for (const Sentence& s : corpus.sentences) {
    bool overlap = false;
    for (std::size_t i = 0; i < s.mentions.size() && !overlap; ++i) {
      for (std::size_t j = i + 1; j < s.mentions.size(); ++j) {
        if (mentions_overlap(s.mentions[i], s.mentions[j])) {
          overlap = true;
          break;
        }
      }
    }
    (overlap ? with : without).sentences.push_back(s);
  }
  return {std::move(with), std::move(without)};
}

}  // namespace sepmark
