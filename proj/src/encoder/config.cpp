// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/encoder/config.hpp"

#include "cannedbot/error.hpp"

namespace cannedbot::encoder {

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be >= 1");
  };
  positive(vocab_size, "vocab_size");
  positive(word_dim, "word_dim");
  positive(utterance_hidden, "utterance_hidden");
  positive(context_hidden, "context_hidden");
  positive(projection_dim, "projection_dim");
  positive(lstm_layers, "lstm_layers");
  positive(max_context_utterances, "max_context_utterances");
  if (utterance_len < 2) throw Error(ErrorCode::kInvalidArgument, "utterance_len must be >= 2");
  if (!(dropout_keep > 0.0 && dropout_keep <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dropout_keep must be in (0, 1]");
  }
}

Json to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size},
          {"word_dim", c.word_dim},
          {"utterance_hidden", c.utterance_hidden},
          {"context_hidden", c.context_hidden},
          {"projection_dim", c.projection_dim},
          {"lstm_layers", c.lstm_layers},
          {"dropout_keep", c.dropout_keep},
          {"share_utterance_weights", c.share_utterance_weights},
          {"utterance_len", c.utterance_len},
          {"max_context_utterances", c.max_context_utterances},
          {"seed", c.seed}};
}

ModelConfig model_config_from_json(const Json& j) {
  ModelConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.word_dim = j.value("word_dim", c.word_dim);
  c.utterance_hidden = j.value("utterance_hidden", c.utterance_hidden);
  c.context_hidden = j.value("context_hidden", c.context_hidden);
  c.projection_dim = j.value("projection_dim", c.projection_dim);
  c.lstm_layers = j.value("lstm_layers", c.lstm_layers);
  c.dropout_keep = j.value("dropout_keep", c.dropout_keep);
  c.share_utterance_weights = j.value("share_utterance_weights", c.share_utterance_weights);
  c.utterance_len = j.value("utterance_len", c.utterance_len);
  c.max_context_utterances = j.value("max_context_utterances", c.max_context_utterances);
  c.seed = j.value("seed", c.seed);
  return c;
}

}  // namespace cannedbot::encoder
