// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/objectives/response_model.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/numerics/checkpoint.hpp"

namespace cannedbot::objectives {

namespace {

constexpr const char* kFormat = "cannedbot.response_model";

struct Built {
  encoder::HierarchicalModel encoder;
  std::optional<BinaryHead> binary;
  std::optional<MulticlassHead> multiclass;
};

Built build(Objective objective, const encoder::ModelConfig& config, const HeadConfig& heads,
            ParameterStore& store) {
  Rng rng(config.seed);
  Built b;
  b.encoder = encoder::HierarchicalModel::create(config, store, rng);
  if (objective == Objective::kBinary) b.binary = BinaryHead::create(store, config.projection_dim, rng);
  if (objective == Objective::kMulticlass) {
    b.multiclass = MulticlassHead::create(store, config.projection_dim, heads.multiclass_hidden,
                                          heads.n_classes, rng);
  }
  return b;
}

}  // namespace

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::kContrastive: return "contrastive";
    case Objective::kBinary: return "binary";
    case Objective::kMulticlass: return "multiclass";
  }
  return "contrastive";
}

Objective objective_from_string(std::string_view s) {
  if (s == "contrastive") return Objective::kContrastive;
  if (s == "binary") return Objective::kBinary;
  if (s == "multiclass") return Objective::kMulticlass;
  throw Error(ErrorCode::kInvalidArgument, "unknown objective '" + std::string(s) + "'");
}

ResponseModel ResponseModel::create(Objective objective, const encoder::ModelConfig& config,
                                    corpus::Vocabulary vocab, const HeadConfig& heads) {
  if (static_cast<std::size_t>(config.vocab_size) != vocab.size()) {
    throw Error(ErrorCode::kInvalidArgument, "config vocab_size " + std::to_string(config.vocab_size) +
                                                 " != vocabulary size " + std::to_string(vocab.size()));
  }
  if (objective == Objective::kMulticlass && heads.n_classes < 1) {
    throw Error(ErrorCode::kClassCountMismatch, "multiclass objective needs n_classes >= 1");
  }
  ResponseModel m;
  m.objective_ = objective;
  m.vocab_ = std::move(vocab);
  m.heads_ = heads;
  if (objective != Objective::kMulticlass) m.heads_.n_classes = 0;
  Built b = build(objective, config, m.heads_, m.params_);
  m.encoder_ = std::move(b.encoder);
  m.binary_ = std::move(b.binary);
  m.multiclass_ = std::move(b.multiclass);
  return m;
}

void ResponseModel::save(const std::filesystem::path& path) const {
  const Json manifest = {{"format", kFormat},
                         {"objective", to_string(objective_)},
                         {"model_config", encoder::to_json(config())},
                         {"heads", {{"multiclass_hidden", heads_.multiclass_hidden}, {"n_classes", heads_.n_classes}}},
                         {"vocab", vocab_.tokens()}};
  numerics::save_checkpoint(path, params_, manifest);
}

ResponseModel ResponseModel::load(const std::filesystem::path& path) {
  numerics::Checkpoint ck = numerics::load_checkpoint(path);
  const Json& m = ck.manifest;
  if (m.value("format", std::string()) != kFormat) {
    throw Error(ErrorCode::kParse, path.string() + " is not a response-model checkpoint");
  }
  HeadConfig heads;
  heads.multiclass_hidden = m.at("heads").at("multiclass_hidden").get<std::vector<int>>();
  heads.n_classes = m.at("heads").at("n_classes").get<int>();
  const auto config = encoder::model_config_from_json(m.at("model_config"));
  auto vocab = corpus::Vocabulary::from_tokens(m.at("vocab").get<std::vector<std::string>>());
  ResponseModel model = create(objective_from_string(m.at("objective").get<std::string>()), config,
                               std::move(vocab), heads);
  model.params_.require_same_layout(ck.params);
  model.params_ = std::move(ck.params);
  return model;
}

const BinaryHead& ResponseModel::binary_head() const {
  if (!binary_) throw Error(ErrorCode::kInvalidArgument, "model has no binary head");
  return *binary_;
}

const MulticlassHead& ResponseModel::multiclass_head() const {
  if (!multiclass_) throw Error(ErrorCode::kInvalidArgument, "model has no multiclass head");
  return *multiclass_;
}

std::string ResponseModel::checkpoint_id() const { return numerics::parameter_digest(params_); }

encoder::TokenRow ResponseModel::tokenize(std::string_view text) const {
  return vocab_.encode_padded(corpus::normalize_text(text), config().utterance_len);
}

Vector ResponseModel::utterance_embedding(std::string_view text) const {
  return encoder_.encode_utterance(params_, tokenize(text));
}

Vector ResponseModel::context_embedding(std::span<const Vector> utterance_embeddings) const {
  return encoder_.encode_context(params_, utterance_embeddings);
}

Vector ResponseModel::target_embedding(std::string_view text) const {
  return encoder_.embed_target(params_, tokenize(text));
}

Real ResponseModel::binary_score(const Vector& context, const Vector& target) const {
  return binary_head().score(params_, context, target);
}

Vector ResponseModel::class_probabilities(const Vector& context) const {
  return multiclass_head().probabilities(params_, context);
}

}  // namespace cannedbot::objectives
