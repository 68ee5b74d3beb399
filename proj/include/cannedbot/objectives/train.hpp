// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/pairs.hpp"
#include "cannedbot/eval/metrics.hpp"
#include "cannedbot/numerics/optimizer.hpp"
#include "cannedbot/objectives/response_model.hpp"

#include <filesystem>
#include <functional>
#include <vector>

namespace cannedbot::objectives {

struct TrainingConfig {
  Real margin = kDefaultMargin;
  int batch_size = 128;
  int epochs = 10;
  numerics::OptimizerConfig optimizer{numerics::OptimizerKind::kSgd, 0.1};
  std::uint64_t seed = 1;
  /// Epochs without a held-out R@3 improvement before stopping; 0 disables.
  int patience = 3;
  /// Restore the parameters of the best held-out epoch when training ends.
  bool keep_best = true;
  /// When set, receives metrics.jsonl, epoch-NNN.ckpt and model.ckpt.
  std::filesystem::path out_dir;
};

Json to_json(const TrainingConfig& c);
/// Missing keys keep their defaults.
TrainingConfig training_config_from_json(const Json& j);

struct EpochMetrics {
  int epoch = 0;
  Real loss = 0.0;
  double r_at_1 = 0.0;
  double r_at_3 = 0.0;
  double r_at_10 = 0.0;
  double seconds = 0.0;
};

Json to_json(const EpochMetrics& m);

struct TrainResult {
  std::vector<EpochMetrics> epochs;
  int best_epoch = 0;
};

/// Training data: pairs plus, for the multiclass objective, one class id per pair.
struct LabelledPairs {
  std::vector<corpus::ContextTargetPair> pairs;
  std::vector<int> class_ids;
};

/// Held-out ranking used between epochs. Contrastive and binary models rank
/// each context against the distinct targets of its block of about 128
/// held-out pairs; multiclass models rank classes.
std::vector<eval::RankingCase> held_out_cases(const ResponseModel& model, const LabelledPairs& held_out);

/// Mean training loss of one epoch before any update, for smoke checks.
Real evaluate_loss(const ResponseModel& model, const LabelledPairs& data, const TrainingConfig& config);

/// Epoch loop over shuffled batches. Throws EmptyDataset without pairs and
/// ClassCountMismatch when multiclass ids are missing or out of range.
TrainResult train(ResponseModel& model, const LabelledPairs& train_data, const LabelledPairs& held_out,
                  const TrainingConfig& config);

/// The differentiable batch loss of `model` on `batch` (indices into
/// `data`), exposed for gradient checking. `rng` drives binary shuffling and,
/// when `train` is set, dropout. Throws BatchTooSmall for the contrastive
/// and binary objectives when the batch has fewer than 2 pairs.
Var batch_loss(Binder& bind, const ResponseModel& model, const LabelledPairs& data,
               std::span<const std::size_t> batch, Real margin, Rng& rng, bool train = true);

}  // namespace cannedbot::objectives
