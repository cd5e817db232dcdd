#pragma once

#include <string>
#include <vector>

#include "odor/autodiff.hpp"
#include "odor/featurize.hpp"
#include "odor/model.hpp"

namespace odor {

/// Checkpoint file layout: magic "ODORCKP1", uint64 little-endian header
/// length, JSON header (configs, element table, vocabulary, array manifest
/// with shapes and offsets), then raw little-endian float64 arrays.
/// Save -> load -> predict is bit-identical.
void save_checkpoint(const std::string& path, ModelParams& params, const FeatureConfig& features,
                     const ElementTable& elements, const std::vector<std::string>& vocabulary,
                     int epoch, const AdamState* optimizer = nullptr);

struct LoadedCheckpoint {
  ModelParams params;
  FeatureConfig features;
  ElementTable elements;
  std::vector<std::string> vocabulary;
  int epoch = 0;
  bool has_optimizer = false;
  AdamState optimizer;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace odor
