#include "sepmark/model.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "sepmark/error.hpp"

namespace sepmark {
namespace {

constexpr char kMagic[4] = {'S', 'M', 'R', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t take_u32(std::istream& in) {
  char b[4];
  if (!in.read(b, 4)) throw DataError("model file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}

std::uint64_t take_u64(std::istream& in) {
  char b[8];
  if (!in.read(b, 8)) throw DataError("model file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}

double take_f64(std::istream& in) { return std::bit_cast<double>(take_u64(in)); }

std::string take_string(std::istream& in) {
  const std::uint32_t size = take_u32(in);
  if (size > (1u << 30)) throw DataError("model file corrupt: oversized string");
  std::string s(size, '\0');
  if (size > 0 && !in.read(s.data(), size)) {
    throw DataError("model file truncated");
  }
  return s;
}

}  // namespace

void save_model(const Model& model, std::ostream& out) {
  if (model.weights.size() != model.dictionary.size()) {
    throw DataError("model is inconsistent: " +
                    std::to_string(model.weights.size()) + " weights for " +
                    std::to_string(model.dictionary.size()) +
                    " dictionary entries");
  }
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  out.put(static_cast<char>(model.scheme));

  const FeatureConfig& cfg = model.feature_config;
  put_u32(out, static_cast<std::uint32_t>(cfg.word_window));
  put_u32(out, static_cast<std::uint32_t>(cfg.pos_window));
  put_u32(out, static_cast<std::uint32_t>(cfg.ngram_max));
  put_u32(out, static_cast<std::uint32_t>(cfg.bow_window));
  put_u32(out, static_cast<std::uint32_t>(cfg.shape_window));
  put_u32(out, static_cast<std::uint32_t>(cfg.affix_max));
  out.put(cfg.orthographic ? 1 : 0);
  out.put(cfg.brown ? 1 : 0);

  put_u32(out, static_cast<std::uint32_t>(model.label_set.size()));
  for (const std::string& label : model.label_set) put_string(out, label);

  put_u32(out, static_cast<std::uint32_t>(model.dictionary.strings().size()));
  for (const std::string& s : model.dictionary.strings()) put_string(out, s);

  put_u64(out, model.weights.size());
  for (const double w : model.weights) put_f64(out, w);
  put_f64(out, model.penalty_offset);

  if (!out) throw DataError("model write failed");
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  save_model(model, out);
}

Model load_model(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != std::string_view(kMagic, 4)) {
    throw DataError("not a model file (bad magic)");
  }
  const std::uint32_t version = take_u32(in);
  if (version != kVersion) {
    throw DataError("unsupported model file version " + std::to_string(version));
  }

  Model model;
  const int scheme = in.get();
  if (scheme < 0 || scheme > static_cast<int>(ModelScheme::Hypergraph)) {
    throw DataError("model file corrupt: unknown scheme tag");
  }
  model.scheme = static_cast<ModelScheme>(scheme);

  FeatureConfig& cfg = model.feature_config;
  cfg.word_window = static_cast<std::int32_t>(take_u32(in));
  cfg.pos_window = static_cast<std::int32_t>(take_u32(in));
  cfg.ngram_max = static_cast<std::int32_t>(take_u32(in));
  cfg.bow_window = static_cast<std::int32_t>(take_u32(in));
  cfg.shape_window = static_cast<std::int32_t>(take_u32(in));
  cfg.affix_max = static_cast<std::int32_t>(take_u32(in));
  cfg.orthographic = in.get() == 1;
  cfg.brown = in.get() == 1;
  if (!in) throw DataError("model file truncated");

  const std::uint32_t n_labels = take_u32(in);
  model.label_set.reserve(n_labels);
  for (std::uint32_t i = 0; i < n_labels; ++i) {
    model.label_set.push_back(take_string(in));
  }

  const std::uint32_t n_strings = take_u32(in);
  for (std::uint32_t i = 0; i < n_strings; ++i) {
    model.dictionary.intern(take_string(in));
  }
  model.dictionary.freeze();

  const std::uint64_t n_weights = take_u64(in);
  if (n_weights != model.dictionary.size()) {
    throw DataError("model file corrupt: " + std::to_string(n_weights) +
                    " weights for " + std::to_string(model.dictionary.size()) +
                    " dictionary entries");
  }
  model.weights.reserve(n_weights);
  for (std::uint64_t i = 0; i < n_weights; ++i) {
    model.weights.push_back(take_f64(in));
  }
  model.penalty_offset = take_f64(in);
  return model;
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file: " + path);
  return load_model(in);
}

}  // namespace sepmark
