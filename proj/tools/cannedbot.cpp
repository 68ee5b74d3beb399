// SPDX-License-Identifier: Apache-2.0
// Command-line entry points for every stage of the pipeline.
#include "cannedbot/corpus/synthetic.hpp"
#include "cannedbot/curation/extract.hpp"
#include "cannedbot/curation/weak_label.hpp"
#include "cannedbot/encoder/embedder.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/eval/calibration.hpp"
#include "cannedbot/eval/ranking.hpp"
#include "cannedbot/serving/http.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <iostream>
#include <memory>
#include <sstream>

using namespace cannedbot;
namespace fs = std::filesystem;

namespace {

fs::path sibling(const fs::path& file, const std::string& name) {
  return file.has_parent_path() ? file.parent_path() / name : fs::path(name);
}

std::vector<corpus::Dialogue> read_regular_corpus(const fs::path& path) {
  std::vector<corpus::Dialogue> out;
  for (const auto& d : corpus::read_corpus(path)) {
    try {
      out.push_back(corpus::regularize_turns(d));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyDialogue) throw;
    }
  }
  return out;
}

std::vector<int> parse_ks(const std::string& s) {
  std::vector<int> ks;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) ks.push_back(std::stoi(item));
  if (ks.empty()) throw Error(ErrorCode::kInvalidArgument, "--k needs at least one value");
  return ks;
}

std::unique_ptr<encoder::UtteranceEmbedder> load_embedder(const std::string& kind, const fs::path& path) {
  if (kind == "skipthought") return std::make_unique<encoder::SkipThoughtEmbedder>(encoder::SkipThoughtEmbedder::load(path));
  if (kind == "matching") {
    const auto m = objectives::ResponseModel::load(path);
    return std::make_unique<encoder::MatchingEmbedder>(m.encoder(), m.params(), m.vocab());
  }
  throw Error(ErrorCode::kInvalidArgument, "embedder must be skipthought or matching, got " + kind);
}

eval::CannedEmbeddings canned_embeddings(const objectives::ResponseModel& model, const curation::CannedList& canned,
                                         const fs::path& dump) {
  return dump.empty() ? eval::embed_canned(model, canned) : eval::load_canned_embeddings(dump);
}

void add_synth(CLI::App& app) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic support corpus with hidden intents");
  auto spec = std::make_shared<corpus::SyntheticSpec>();
  auto out = std::make_shared<fs::path>();
  auto templates = std::make_shared<fs::path>();
  cmd->add_option("--seed", spec->seed);
  cmd->add_option("--intents", spec->n_intents);
  cmd->add_option("--dialogues", spec->n_dialogues);
  cmd->add_option("--noise", spec->noise);
  cmd->add_option("--out", *out, "corpus file")->required();
  cmd->add_option("--templates-out", *templates, "canned list of the intent templates");
  cmd->callback([=] {
    const auto syn = corpus::generate_synthetic_corpus(*spec);
    corpus::write_corpus(*out, syn.dialogues);
    if (!templates->empty()) {
      curation::CannedList list;
      for (const auto& i : syn.intents) list.append(i.template_text);
      curation::write_canned_list(*templates, list);
    }
    std::cout << corpus::format_stats(syn.stats);
  });
}

void add_prep(CLI::App& app) {
  auto* cmd = app.add_subcommand("prep", "Regularize a corpus and build the vocabulary and training pairs");
  struct Args {
    fs::path corpus, out, vocab, held_out;
    std::size_t vocab_cap = corpus::kDefaultVocabCap;
    corpus::PairOptions pairs;
    int held_out_every = 0;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--corpus", a->corpus)->required();
  cmd->add_option("--vocab-cap", a->vocab_cap);
  cmd->add_option("--utterance-len", a->pairs.utterance_len);
  cmd->add_option("--max-context", a->pairs.max_context_utterances);
  cmd->add_option("--out", a->out, "pair file")->required();
  cmd->add_option("--vocab-out", a->vocab, "defaults to vocab.txt beside --out");
  cmd->add_option("--held-out", a->held_out, "pair file for every --held-out-every-th dialogue");
  cmd->add_option("--held-out-every", a->held_out_every);
  cmd->callback([=] {
    const auto dialogues = read_regular_corpus(a->corpus);
    const auto vocab = corpus::Vocabulary::build(dialogues, a->vocab_cap);
    vocab.save(a->vocab.empty() ? sibling(a->out, "vocab.txt") : a->vocab);
    auto pairs = corpus::make_pairs(dialogues, vocab, a->pairs);
    std::size_t held = 0;
    if (!a->held_out.empty()) {
      auto split = corpus::split_by_dialogue(pairs, a->held_out_every == 0 ? 10 : a->held_out_every);
      corpus::write_pairs(a->held_out, split.held_out);
      held = split.held_out.size();
      pairs = std::move(split.train);
    }
    corpus::write_pairs(a->out, pairs);
    std::cout << Json{{"dialogues", dialogues.size()}, {"vocab", vocab.size()}, {"pairs", pairs.size()},
                      {"held_out", held}}
                     .dump()
              << "\n";
  });
}

void add_train(CLI::App& app) {
  auto* cmd = app.add_subcommand("train", "Train a response-selection model");
  struct Args {
    std::string objective = "contrastive";
    fs::path pairs, config, out, vocab, held_out, canned;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--objective", a->objective)->check(CLI::IsMember({"contrastive", "binary", "multiclass"}));
  cmd->add_option("--pairs", a->pairs)->required();
  cmd->add_option("--config", a->config, "JSON {model, training, multiclass_hidden}");
  cmd->add_option("--out", a->out, "output directory")->required();
  cmd->add_option("--vocab", a->vocab, "defaults to vocab.txt beside --pairs");
  cmd->add_option("--held-out", a->held_out, "held-out pairs; default holds out every 10th dialogue");
  cmd->add_option("--canned", a->canned, "canned list defining the multiclass classes");
  cmd->callback([=] {
    const Json cfg = a->config.empty() ? Json::object() : read_json_file(a->config);
    const auto vocab = corpus::Vocabulary::load(a->vocab.empty() ? sibling(a->pairs, "vocab.txt") : a->vocab);
    auto model_cfg = encoder::model_config_from_json(cfg.value("model", Json::object()));
    model_cfg.vocab_size = static_cast<int>(vocab.size());
    auto training = objectives::training_config_from_json(cfg.value("training", Json::object()));
    training.out_dir = a->out;
    const auto objective = objectives::objective_from_string(a->objective);

    auto pairs = corpus::read_pairs(a->pairs);
    std::vector<corpus::ContextTargetPair> held;
    if (a->held_out.empty()) {
      auto split = corpus::split_by_dialogue(pairs, 10);
      pairs = std::move(split.train);
      held = std::move(split.held_out);
    } else {
      held = corpus::read_pairs(a->held_out);
    }
    objectives::LabelledPairs train_data{pairs, {}}, held_data{held, {}};
    objectives::HeadConfig heads;
    if (cfg.contains("multiclass_hidden")) heads.multiclass_hidden = cfg["multiclass_hidden"].get<std::vector<int>>();
    if (objective == objectives::Objective::kMulticlass) {
      if (a->canned.empty()) throw Error(ErrorCode::kInvalidArgument, "multiclass training needs --canned");
      const auto canned = curation::read_canned_list(a->canned);
      train_data = eval::label_by_canned(pairs, canned);
      held_data = eval::label_by_canned(held, canned);
      heads.n_classes = static_cast<int>(canned.size());
    }
    auto model = objectives::ResponseModel::create(objective, model_cfg, vocab, heads);
    const auto result = objectives::train(model, train_data, held_data, training);
    for (const auto& e : result.epochs) std::cout << to_json(e).dump() << "\n";
    std::cout << Json{{"best_epoch", result.best_epoch}, {"model", (a->out / "model.ckpt").string()}}.dump() << "\n";
  });
}

void add_train_skipthought(CLI::App& app) {
  auto* cmd = app.add_subcommand("train-skipthought", "Train the utterance embedder used for curation");
  struct Args {
    fs::path corpus, vocab, out;
    encoder::SkipThoughtConfig config;
    encoder::SkipThoughtTrainOptions options;
    std::size_t vocab_cap = corpus::kDefaultVocabCap;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--corpus", a->corpus)->required();
  cmd->add_option("--vocab", a->vocab, "built from the corpus when omitted");
  cmd->add_option("--vocab-cap", a->vocab_cap);
  cmd->add_option("--word-dim", a->config.word_dim);
  cmd->add_option("--hidden", a->config.hidden);
  cmd->add_option("--utterance-len", a->config.utterance_len);
  cmd->add_option("--epochs", a->options.epochs);
  cmd->add_option("--batch-size", a->options.batch_size);
  cmd->add_option("--seed", a->config.seed);
  cmd->add_option("--out", a->out, "checkpoint")->required();
  cmd->callback([=] {
    const auto dialogues = read_regular_corpus(a->corpus);
    const auto vocab = a->vocab.empty() ? corpus::Vocabulary::build(dialogues, a->vocab_cap)
                                        : corpus::Vocabulary::load(a->vocab);
    auto config = a->config;
    config.vocab_size = static_cast<int>(vocab.size());
    numerics::ParameterStore store;
    numerics::Rng rng(config.seed);
    const auto model = encoder::SkipThoughtModel::create(config, store, rng);
    const auto windows = encoder::make_skipthought_windows(dialogues, vocab, config.utterance_len);
    auto options = a->options;
    options.seed = config.seed;
    const auto losses = encoder::train_skipthought(model, store, windows, options);
    encoder::SkipThoughtEmbedder(model, std::move(store), vocab).save(a->out);
    std::cout << Json{{"windows", windows.size()}, {"epoch_losses", losses}}.dump() << "\n";
  });
}

void add_extract(CLI::App& app) {
  auto* cmd = app.add_subcommand("extract-canned", "Cluster frequent agent utterances into a canned list");
  struct Args {
    fs::path corpus, model, out;
    std::string embedder = "skipthought";
    curation::ExtractOptions options;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--corpus", a->corpus)->required();
  cmd->add_option("--embedder", a->embedder)->check(CLI::IsMember({"skipthought", "matching"}));
  cmd->add_option("--model", a->model, "skip-thought or matching-model checkpoint")->required();
  cmd->add_option("--top-n", a->options.top_n);
  cmd->add_option("--k", a->options.k);
  cmd->add_option("--seed", a->options.seed);
  cmd->add_option("--max-iter", a->options.max_iter);
  cmd->add_option("--dedup-threshold", a->options.dedup_threshold);
  cmd->add_option("--out", a->out)->required();
  cmd->callback([=] {
    const auto embedder = load_embedder(a->embedder, a->model);
    const auto list = curation::extract_canned_list(read_regular_corpus(a->corpus), *embedder, a->options);
    curation::write_canned_list(a->out, list);
    std::cout << Json{{"canned", list.size()}}.dump() << "\n";
  });
}

void add_weak_label(CLI::App& app) {
  auto* cmd = app.add_subcommand("weak-label", "Derive positive and negative labels for (context, canned) pairs");
  struct Args {
    fs::path pairs, canned, model, usage, out;
    std::string embedder = "matching";
    std::string strategies = "exact,fuzzy,neg-wrong,neg-nomatch,neg-rejected";
    double threshold = curation::kDefaultSimilarityThreshold;
    curation::NegativeOptions negatives;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--pairs", a->pairs)->required();
  cmd->add_option("--canned", a->canned)->required();
  cmd->add_option("--embedder", a->embedder)->check(CLI::IsMember({"skipthought", "matching"}));
  cmd->add_option("--model", a->model, "embedder checkpoint for fuzzy matching and negatives");
  cmd->add_option("--usage", a->usage, "exported usage log");
  cmd->add_option("--strategies", a->strategies);
  cmd->add_option("--threshold", a->threshold);
  cmd->add_option("--wrong-target-ratio", a->negatives.wrong_target_ratio);
  cmd->add_option("--no-match-ratio", a->negatives.no_match_ratio);
  cmd->add_option("--usage-sample-rate", a->negatives.usage_sample_rate);
  cmd->add_option("--seed", a->negatives.seed);
  cmd->add_option("--out", a->out)->required();
  cmd->callback([=] {
    std::set<std::string> use;
    std::stringstream ss(a->strategies);
    const std::set<std::string> known = {"exact", "fuzzy", "usage", "neg-wrong", "neg-nomatch", "neg-rejected"};
    for (std::string s; std::getline(ss, s, ',');) {
      if (!known.count(s)) throw Error(ErrorCode::kInvalidArgument, "unknown strategy " + s);
      use.insert(s);
    }
    const auto pairs = corpus::read_pairs(a->pairs);
    const auto canned = curation::read_canned_list(a->canned);
    const auto usage = a->usage.empty() ? std::vector<curation::UsageLogEntry>{} : curation::read_usage_entries(a->usage);
    const bool needs_embedder = use.count("fuzzy") || use.count("neg-wrong") || use.count("neg-nomatch");
    if (needs_embedder && a->model.empty()) throw Error(ErrorCode::kInvalidArgument, "these strategies need --model");
    const auto embedder = needs_embedder ? load_embedder(a->embedder, a->model) : nullptr;

    std::vector<curation::WeakLabel> positives;
    if (use.count("exact")) {
      const auto x = curation::exact_match_positives(pairs, canned);
      positives.insert(positives.end(), x.begin(), x.end());
    }
    if (use.count("fuzzy")) {
      const auto x = curation::fuzzy_match_positives(pairs, canned, *embedder, {.threshold = a->threshold});
      positives.insert(positives.end(), x.begin(), x.end());
    }
    if (use.count("usage") || use.count("neg-rejected")) {
      const auto x = curation::usage_positives(usage, canned);
      positives.insert(positives.end(), x.begin(), x.end());
    }
    auto labels = positives;
    if (use.count("neg-wrong") || use.count("neg-nomatch") || use.count("neg-rejected")) {
      auto opts = a->negatives;
      opts.threshold = a->threshold;
      if (!use.count("neg-wrong")) opts.wrong_target_ratio = 0.0;
      if (!use.count("neg-nomatch")) opts.no_match_ratio = 0.0;
      if (!use.count("neg-rejected")) opts.usage_sample_rate = 0.0;
      const encoder::UtteranceEmbedder* e = embedder.get();
      if (!e) throw Error(ErrorCode::kInvalidArgument, "negative strategies need --model");
      const auto neg = curation::build_negative_dataset(positives, pairs, canned, *e, usage, opts);
      labels.insert(labels.end(), neg.begin(), neg.end());
    }
    labels = curation::resolve_conflicts(std::move(labels));
    curation::write_weak_labels(a->out, labels);
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) {
      ++counts[std::string(curation::to_string(l.polarity)) + ":" +
               (l.source ? std::string(curation::to_string(*l.source))
                         : std::string(curation::to_string(*l.strategy)))];
    }
    std::cout << Json(counts).dump() << "\n";
  });
}

void add_embed_canned(CLI::App& app) {
  auto* cmd = app.add_subcommand("embed-canned", "Embed a canned list with a checkpoint");
  auto model = std::make_shared<fs::path>();
  auto canned = std::make_shared<fs::path>();
  auto out = std::make_shared<fs::path>();
  cmd->add_option("--model", *model)->required();
  cmd->add_option("--canned", *canned)->required();
  cmd->add_option("--out", *out)->required();
  cmd->callback([=] {
    const auto m = objectives::ResponseModel::load(*model);
    const auto dump = eval::embed_canned(m, curation::read_canned_list(*canned));
    eval::save_canned_embeddings(*out, dump);
    std::cout << Json{{"checkpoint_id", dump.checkpoint_id}, {"rows", dump.embeddings.rows()}}.dump() << "\n";
  });
}

struct EvalArgs {
  fs::path model, canned, pairs, report, embeddings;
  std::string protocol = "canned";
  std::string ks = "1,3,10";
  std::uint64_t seed = 1;
};

void add_eval_options(CLI::App* cmd, EvalArgs& a) {
  cmd->add_option("--model", a.model)->required();
  cmd->add_option("--canned", a.canned)->required();
  cmd->add_option("--pairs", a.pairs)->required();
  cmd->add_option("--embeddings", a.embeddings, "canned embedding dump; computed when omitted");
  cmd->add_option("--seed", a.seed);
  cmd->add_option("--report", a.report)->required();
}

eval::Evaluation run_eval(const EvalArgs& a, eval::Protocol protocol) {
  const auto model = objectives::ResponseModel::load(a.model);
  const auto canned = curation::read_canned_list(a.canned);
  const auto dump = canned_embeddings(model, canned, a.embeddings);
  return eval::evaluate(model, corpus::read_pairs(a.pairs), canned, dump,
                        {.protocol = protocol, .ks = parse_ks(a.ks), .seed = a.seed});
}

void add_eval(CLI::App& app) {
  auto* cmd = app.add_subcommand("eval", "Recall@k and Avg-Pos of a model on held-out pairs");
  auto a = std::make_shared<EvalArgs>();
  add_eval_options(cmd, *a);
  cmd->add_option("--protocol", a->protocol)->check(CLI::IsMember({"canned", "batch128"}));
  cmd->add_option("--k", a->ks);
  cmd->callback([=] {
    const Json j = to_json(run_eval(*a, eval::protocol_from_string(a->protocol)));
    write_json_file(a->report, j);
    std::cout << j.dump() << "\n";
  });
}

void add_calibrate(CLI::App& app) {
  auto* cmd = app.add_subcommand("calibrate", "Pick the confidence threshold for a target suggestion rate");
  auto a = std::make_shared<EvalArgs>();
  auto rate = std::make_shared<double>(0.7);
  add_eval_options(cmd, *a);
  cmd->add_option("--target-rate", *rate);
  cmd->callback([=] {
    const auto ev = run_eval(*a, eval::Protocol::kCanned);
    const Json j = eval::to_json(eval::calibrate_threshold(ev.confidences, *rate));
    write_json_file(a->report, j);
    std::cout << j.dump() << "\n";
  });
}

serving::HttpServer* g_server = nullptr;

void add_serve(CLI::App& app) {
  auto* cmd = app.add_subcommand("serve", "Serve suggestions over HTTP");
  struct Args {
    fs::path model, canned, threshold_report, embeddings;
    std::string host = "127.0.0.1";
    int port = 8080;
    serving::ServiceConfig config;
    double threshold = 0.0;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--model", a->model)->required();
  cmd->add_option("--canned", a->canned)->required();
  cmd->add_option("--embeddings", a->embeddings, "canned embedding dump; computed when omitted");
  cmd->add_option("--threshold-report", a->threshold_report, "calibration report");
  cmd->add_option("--threshold", a->threshold, "used without --threshold-report");
  cmd->add_option("--host", a->host);
  cmd->add_option("--port", a->port);
  cmd->add_option("--tier1-cap", a->config.tier1_capacity);
  cmd->add_option("--tier2-cap", a->config.tier2_capacity);
  cmd->add_option("--usage-log", a->config.usage_log);
  cmd->callback([=] {
    auto config = a->config;
    config.canned_path = a->canned;
    if (!a->embeddings.empty()) config.embeddings_path = a->embeddings;
    serving::SuggestionService service(config);
    auto model = std::make_shared<const objectives::ResponseModel>(objectives::ResponseModel::load(a->model));
    auto canned = curation::read_canned_list(a->canned);
    auto dump = canned_embeddings(*model, canned, a->embeddings);
    service.load(model, std::move(canned), std::move(dump));
    if (a->threshold_report.empty()) {
      service.set_threshold(a->threshold);
    } else {
      service.reload_threshold(a->threshold_report);
    }
    serving::HttpServer server(service);
    const int port = server.bind(a->host, a->port);
    g_server = &server;
    std::signal(SIGINT, [](int) {
      if (g_server) g_server->stop();
    });
    std::signal(SIGTERM, [](int) {
      if (g_server) g_server->stop();
    });
    std::cout << Json{{"listening", a->host + ":" + std::to_string(port)}, {"threshold", service.threshold()}}.dump()
              << std::endl;
    server.listen();
    g_server = nullptr;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cannedbot: retrieval-based response suggestion"};
  app.require_subcommand(1);
  add_synth(app);
  add_prep(app);
  add_train(app);
  add_train_skipthought(app);
  add_extract(app);
  add_weak_label(app);
  add_embed_canned(app);
  add_eval(app);
  add_calibrate(app);
  add_serve(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
