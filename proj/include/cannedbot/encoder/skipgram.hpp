// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/dialogue.hpp"
#include "cannedbot/corpus/vocabulary.hpp"
#include "cannedbot/numerics/tensor.hpp"

#include <cstdint>
#include <vector>

namespace cannedbot::encoder {

struct SkipGramConfig {
  int dim = 64;
  int window = 2;
  int negatives = 5;
  int epochs = 3;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

/// Skip-gram with negative sampling over the normalized utterances of
/// `dialogues`. Noise words are drawn from unigram counts raised to 0.75 and
/// the learning rate decays linearly to 1e-4 of its start. Both tables are
/// [vocab.size(), dim]; `input` is what initializes a word embedding.
struct SkipGramVectors {
  numerics::Tensor input;
  numerics::Tensor output;
};

SkipGramVectors train_skipgram(const std::vector<corpus::Dialogue>& dialogues,
                                const corpus::Vocabulary& vocab, const SkipGramConfig& config);

/// Mean negative-sampling objective of `vectors` on the corpus with fixed
/// noise draws; used to observe training progress.
double skipgram_loss(const std::vector<corpus::Dialogue>& dialogues, const corpus::Vocabulary& vocab,
                     const numerics::Tensor& input_vectors, const numerics::Tensor& output_vectors,
                     const SkipGramConfig& config);

}  // namespace cannedbot::encoder
