// SPDX-License-Identifier: Apache-2.0
// Exact bag-of-words embedder: a transparent similarity oracle for tests
// that must not depend on a trained model.
#pragma once

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/corpus/vocabulary.hpp"
#include "cannedbot/encoder/embedder.hpp"

#include <string>

namespace cannedbot::testing {

class BagOfWordsEmbedder final : public encoder::UtteranceEmbedder {
 public:
  explicit BagOfWordsEmbedder(corpus::Vocabulary vocab) : vocab_(std::move(vocab)) {}

  numerics::Vector embed(std::string_view text) const override {
    numerics::Vector v = numerics::Vector::Zero(dim());
    for (int id : vocab_.encode(corpus::normalize_text(text))) v(id) += 1.0;
    return v;
  }
  int dim() const override { return static_cast<int>(vocab_.size()); }
  std::string id() const override { return "bow-" + std::to_string(vocab_.size()); }

 private:
  corpus::Vocabulary vocab_;
};

}  // namespace cannedbot::testing
