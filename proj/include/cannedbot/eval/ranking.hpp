// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/pairs.hpp"
#include "cannedbot/curation/canned.hpp"
#include "cannedbot/eval/calibration.hpp"
#include "cannedbot/eval/metrics.hpp"
#include "cannedbot/objectives/train.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cannedbot::eval {

using numerics::Tensor;
using numerics::Vector;
using objectives::ResponseModel;

/// Target embeddings of a canned list, row i for canned id i, stamped with
/// the checkpoint that computed them.
struct CannedEmbeddings {
  std::string checkpoint_id;
  Tensor embeddings;
};

CannedEmbeddings embed_canned(const ResponseModel& model, const curation::CannedList& canned);
void save_canned_embeddings(const std::filesystem::path& path, const CannedEmbeddings& dump);
CannedEmbeddings load_canned_embeddings(const std::filesystem::path& path);

struct RankedResponse {
  int canned_id = 0;
  double confidence = 0.0;
};

/// Every canned response, by descending confidence (ties to the lower id).
/// Confidence is the cosine similarity for contrastive models, the sigmoid
/// score for binary models and the class probability for multiclass models.
/// Throws ChecksumMismatch when the dump was built by another checkpoint or
/// for a list of another size, ClassCountMismatch when a multiclass head
/// does not match the list.
std::vector<RankedResponse> rank_canned(const ResponseModel& model, const Vector& context_embedding,
                                        const curation::CannedList& canned, const CannedEmbeddings& dump);

/// The checks rank_canned performs, for callers that rank many contexts
/// against one validated snapshot.
void check_canned_embeddings(const ResponseModel& model, const curation::CannedList& canned,
                             const CannedEmbeddings& dump);
/// rank_canned without the checks; `dump` must have passed them.
std::vector<RankedResponse> rank_checked(const ResponseModel& model, const Vector& context_embedding,
                                         const CannedEmbeddings& dump);

/// Context embedding of the utterance texts, oldest first; computes each
/// distinct text once per call.
Vector embed_context_texts(const ResponseModel& model, std::span<const std::string> texts);
std::vector<std::string> context_texts(const corpus::ContextTargetPair& pair);

enum class Protocol { kCanned, kBatch128 };
std::string_view to_string(Protocol p);
Protocol protocol_from_string(std::string_view s);

struct EvaluationOptions {
  Protocol protocol = Protocol::kCanned;
  std::vector<int> ks = {1, 3, 10};
  /// Candidates per case under kBatch128: the true response plus n - 1 others.
  std::size_t batch_candidates = 128;
  std::uint64_t seed = 1;
};

struct Evaluation {
  RecallReport report;
  std::vector<RankingCase> cases;
  /// Top-1 confidence and correctness per case, for calibration.
  std::vector<ConfidenceCase> confidences;
  /// Pairs without a canned label under kCanned.
  std::size_t skipped = 0;
};

/// kCanned ranks the full canned list; a pair's true id is the canned
/// response its target matches after normalization, or `labels[i]` when
/// given. kBatch128 ranks the true target against other distinct in-corpus
/// targets and needs a matching (contrastive or binary) model.
Evaluation evaluate(const ResponseModel& model, const std::vector<corpus::ContextTargetPair>& pairs,
                    const curation::CannedList& canned, const CannedEmbeddings& dump,
                    const EvaluationOptions& options, std::span<const int> labels = {});

Json to_json(const Evaluation& e);

/// Pairs whose normalized target is a canned response, each labelled with
/// that response's id: the multiclass training set over `canned`.
objectives::LabelledPairs label_by_canned(const std::vector<corpus::ContextTargetPair>& pairs,
                                          const curation::CannedList& canned);

}  // namespace cannedbot::eval
