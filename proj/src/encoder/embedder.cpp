// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/encoder/embedder.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/numerics/checkpoint.hpp"

namespace cannedbot::encoder {

namespace {

constexpr const char* kSkipThoughtFormat = "cannedbot.skipthought";

}  // namespace

Tensor UtteranceEmbedder::embed_all(const std::vector<std::string>& texts) const {
  Tensor out(static_cast<Eigen::Index>(texts.size()), dim());
  for (std::size_t i = 0; i < texts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = embed(texts[i]);
  return out;
}

SkipThoughtEmbedder::SkipThoughtEmbedder(SkipThoughtModel model, ParameterStore store,
                                         corpus::Vocabulary vocab)
    : model_(std::move(model)),
      store_(std::move(store)),
      vocab_(std::move(vocab)),
      id_("skipthought:" + numerics::parameter_digest(store_)) {}

Vector SkipThoughtEmbedder::embed(std::string_view text) const {
  return model_.embed(store_, vocab_.encode_padded(corpus::normalize_text(text),
                                                   model_.config().utterance_len));
}

void SkipThoughtEmbedder::save(const std::filesystem::path& path) const {
  numerics::save_checkpoint(path, store_,
                            {{"format", kSkipThoughtFormat},
                             {"config", to_json(model_.config())},
                             {"vocab", vocab_.tokens()}});
}

SkipThoughtEmbedder SkipThoughtEmbedder::load(const std::filesystem::path& path) {
  auto ck = numerics::load_checkpoint(path);
  if (ck.manifest.value("format", std::string()) != kSkipThoughtFormat) {
    throw Error(ErrorCode::kParse, path.string() + " is not a skip-thought checkpoint");
  }
  const auto config = skipthought_config_from_json(ck.manifest.at("config"));
  auto vocab = corpus::Vocabulary::from_tokens(ck.manifest.at("vocab").get<std::vector<std::string>>());
  auto model = SkipThoughtModel::attach(config, ck.params);
  return SkipThoughtEmbedder(std::move(model), std::move(ck.params), std::move(vocab));
}

MatchingEmbedder::MatchingEmbedder(HierarchicalModel model, ParameterStore store,
                                   corpus::Vocabulary vocab)
    : model_(std::move(model)),
      store_(std::move(store)),
      vocab_(std::move(vocab)),
      id_("matching:" + numerics::parameter_digest(store_)) {}

Vector MatchingEmbedder::embed(std::string_view text) const {
  return model_.embed_target(store_, vocab_.encode_padded(corpus::normalize_text(text),
                                                          model_.config().utterance_len));
}

}  // namespace cannedbot::encoder
