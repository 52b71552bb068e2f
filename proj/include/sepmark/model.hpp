#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sepmark/features.hpp"
#include "sepmark/network.hpp"

namespace sepmark {

// Everything needed to score and decode new text. Brown cluster files are
// not embedded; a model whose feature config enables them expects the same
// cluster file to be supplied again at prediction time.
struct Model {
  ModelScheme scheme = ModelScheme::Edge;
  FeatureConfig feature_config;
  std::vector<std::string> label_set;
  FeatureDictionary dictionary;  // frozen
  std::vector<double> weights;   // one per dictionary index
  double penalty_offset = 0.0;   // decode-time addition to weight index 0

  bool operator==(const Model&) const = default;
};

// Versioned little-endian binary container; load(save(m)) == m exactly.
void save_model(const Model& model, std::ostream& out);
void save_model(const Model& model, const std::string& path);
Model load_model(std::istream& in);
Model load_model(const std::string& path);

}  // namespace sepmark
