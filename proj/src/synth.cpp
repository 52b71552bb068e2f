#include "sepmark/synth.hpp"

#include <random>
#include <string>

#include "sepmark/error.hpp"

namespace sepmark {

namespace {

// Words that never participate in a mention.
constexpr const char* kFillers[] = {
    "adun",   "belor", "cadim", "darv",  "elmik", "folun",  "gerin",
    "havrin", "ilat",  "jorun", "kels",  "limar", "morvan", "nalor",
    "ovik",   "palor", "quen",  "rilva", "senda", "tovar",  "uvol",
    "velk",   "worin", "xilba", "yoren", "zavel", "bodrin", "calew",
    "dumar",  "ethin", "fosk",  "galt",  "hilor", "irven",  "jalk",
    "kovar",  "lirn",  "mosta", "nuvel",
};
constexpr int kNumFillers = static_cast<int>(std::size(kFillers));

}  // namespace

Corpus make_synthetic_corpus(const SynthConfig& config) {
  if (config.sentences < 0) {
    throw DataError("synthetic corpus needs a non-negative sentence count");
  }
  if (config.min_length < 1 || config.max_length < config.min_length) {
    throw DataError("synthetic sentence lengths need 1 <= min <= max");
  }
  if (config.nested_percent < 0 || config.nested_percent > 100) {
    throw DataError("nested_percent must lie in [0, 100]");
  }

  std::mt19937_64 rng(config.seed);
  Corpus corpus;
  corpus.sentences.reserve(config.sentences);

  for (int s = 0; s < config.sentences; ++s) {
    int length = config.min_length +
                 static_cast<int>(rng() % static_cast<std::uint64_t>(
                                              config.max_length -
                                              config.min_length + 1));
    bool want_nest = static_cast<int>(rng() % 100) < config.nested_percent;

    Sentence sentence;
    sentence.id = "syn" + std::to_string(s);
    auto word = [&sentence](const char* w) {
      sentence.tokens.push_back({w, "-"});
    };

    while (sentence.size() < length) {
      int remaining = length - sentence.size();
      int at = sentence.size();

      if (want_nest && remaining >= 3) {
        // Place the pending nested pattern now or keep room for it later.
        if (remaining == 3 || rng() % 2 == 0) {
          if (rng() % 2 == 0) {
            word("korin");
            word("talva");
            word("mirex");
            sentence.add_mention({at, at + 2, "PER"});
            sentence.add_mention({at + 1, at + 1, "PER"});
          } else {
            word("seldon");
            word("varga");
            sentence.add_mention({at, at + 1, "PER"});
            sentence.add_mention({at, at, "PER"});
          }
          want_nest = false;
          continue;
        }
      }

      int cap = (want_nest && remaining >= 3) ? remaining - 3 : remaining;
      int roll = static_cast<int>(rng() % 100);
      if (roll < 12 && cap >= 2) {
        if (rng() % 2 == 0) {
          // Cross-type overlap: the organization's last word is a person.
          word("gatra");
          word("holn");
          sentence.add_mention({at, at + 1, "ORG"});
          sentence.add_mention({at + 1, at + 1, "PER"});
        } else {
          word("ivex");
          word("jolk");
          sentence.add_mention({at, at + 1, "ORG"});
        }
      } else if (roll < 22) {
        if (rng() % 2 == 0) {
          word("farim");
          sentence.add_mention({at, at, "PER"});
        } else {
          word("norv");
          sentence.add_mention({at, at, "ORG"});
        }
      } else {
        word(kFillers[rng() % kNumFillers]);
      }
    }

    corpus.sentences.push_back(std::move(sentence));
  }

  corpus.rebuild_label_set();
  return corpus;
}

}  // namespace sepmark
