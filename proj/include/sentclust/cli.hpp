#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sentclust/classifier.hpp"
#include "sentclust/corpus.hpp"
#include "sentclust/error.hpp"
#include "sentclust/eval.hpp"
#include "sentclust/gmm.hpp"
#include "sentclust/io.hpp"
#include "sentclust/polarity.hpp"
#include "sentclust/random.hpp"
#include "sentclust/vectors.hpp"

namespace sentclust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Everything the subcommands read from the command line.
struct PipelineConfig {
  std::vector<std::string> corpus;
  std::string lexicon, lemma_map, centroids;
  std::string embeddings, annotations, pc_annotations, labels, grid, params;
  std::string model, ids, split_dir, out, out_dir, summary, scores, report, log;
  std::string gold, pred, groups, json_out, confusion_out, grouped_out, a, b;
  std::uint64_t seed = 0;
  bool standardize = false;
  bool present_only = false;
  bool log_grad_norms = false;

  TrainConfig train;
  std::string loss = "ce";
  std::size_t hidden_size = 128;
  std::size_t layers = 0;
  std::size_t trials = 4;
  double min_lr = 1e-5;
  double max_lr = 1e-2;
};

namespace detail {

inline Corpus load_corpus(const std::vector<std::string>& paths, const std::string& lemma_map) {
  std::vector<Corpus> parts;
  for (const auto& p : paths) {
    auto in = io::open_input(p);
    parts.push_back(parse_conllu(in, fs::path(p).filename().string()));
  }
  Corpus corpus = merge(std::move(parts));
  if (!lemma_map.empty()) {
    auto in = io::open_input(lemma_map);
    corpus = apply_lemma_map(std::move(corpus), load_lemma_map(in, lemma_map));
  }
  return corpus;
}

inline EmbeddingStore load_store(const std::string& path) {
  auto in = io::open_input(path);
  return load_embeddings(in, path);
}

inline std::vector<PcAnnotation> load_annotations(const std::string& path) {
  auto in = io::open_input(path);
  return read_annotations(in, path);
}

inline json load_json(const std::string& path) {
  try {
    return json::parse(io::read_all(path));
  } catch (const json::parse_error& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
}

inline CentroidSet load_centroids(const std::string& path) {
  const auto j = load_json(path);
  std::array<PolarityCoordinate, kNumClasses> points{};
  try {
    for (auto label : kAllLabels) {
      const auto xy = j.at(std::string(to_string(label))).get<std::vector<double>>();
      if (xy.size() != 2) throw DataError("centroid must be [polarity, intensity]");
      points[index_of(label)] = {xy[0], xy[1]};
    }
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return CentroidSet(points);
}

inline void write_summary(std::ostream& out, const std::array<std::size_t, kNumClasses>& counts) {
  std::size_t total = 0;
  out << "label\tcount\n";
  for (auto l : kAllLabels) {
    out << to_string(l) << '\t' << counts[index_of(l)] << '\n';
    total += counts[index_of(l)];
  }
  out << "total\t" << total << '\n';
}

inline void write_json(const std::string& path, const ordered_json& j) {
  io::write_atomic(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

/// Joins label rows with embeddings for the given ids.
inline std::vector<TrainExample> examples_for(
    const std::vector<std::string>& ids,
    const std::unordered_map<std::string, io::LabeledId>& labels, const EmbeddingStore& store) {
  std::vector<TrainExample> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = labels.find(id);
    if (it == labels.end()) throw DataError("no label for sentence '" + id + "'");
    const auto& v = store.at(id);
    TrainExample ex;
    ex.features = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    ex.label = it->second.label;
    ex.alpha = it->second.alpha;
    out.push_back(std::move(ex));
  }
  return out;
}

struct TrainingData {
  std::vector<TrainExample> train, validation, test;
};

inline TrainingData load_training_data(const PipelineConfig& cfg) {
  std::unordered_map<std::string, io::LabeledId> labels;
  for (auto& row : io::read_labels(cfg.annotations)) labels.emplace(row.id, row);
  const auto store = load_store(cfg.embeddings);
  const fs::path dir(cfg.split_dir);
  TrainingData data;
  data.train = examples_for(io::read_ids(dir / "train.txt"), labels, store);
  data.validation = examples_for(io::read_ids(dir / "validation.txt"), labels, store);
  if (fs::exists(dir / "test.txt")) {
    data.test = examples_for(io::read_ids(dir / "test.txt"), labels, store);
  }
  return data;
}

inline TrainConfig train_config(const PipelineConfig& cfg) {
  TrainConfig c = cfg.train;
  c.loss_kind = parse_loss_kind(cfg.loss);
  c.hidden_sizes.assign(cfg.layers, cfg.hidden_size);
  c.seed = derive_seed(cfg.seed, "train");
  c.log_grad_norms = cfg.log_grad_norms;
  return c;
}

inline ordered_json model_document(const ModelParams& params, const TrainConfig& config,
                                   const TrainReport& report) {
  ordered_json j = to_json(params);
  j["train_config"] = to_json(config);
  j["report"] = to_json(report);
  return j;
}

/// Label pairs for ids present in both files, in `a` order. With
/// `require_all`, every id of `a` must also appear in `b`.
inline std::pair<std::vector<SentimentLabel>, std::vector<SentimentLabel>> join_labels(
    const std::vector<io::LabeledId>& a, const std::vector<io::LabeledId>& b,
    const std::string& b_name, bool require_all, std::vector<std::string>* ids = nullptr) {
  std::unordered_map<std::string, SentimentLabel> bmap;
  for (const auto& r : b) bmap.emplace(r.id, r.label);
  std::pair<std::vector<SentimentLabel>, std::vector<SentimentLabel>> out;
  for (const auto& r : a) {
    auto it = bmap.find(r.id);
    if (it == bmap.end()) {
      if (require_all) throw DataError("'" + r.id + "' missing from " + b_name);
      continue;
    }
    out.first.push_back(r.label);
    out.second.push_back(it->second);
    if (ids) ids->push_back(r.id);
  }
  if (out.first.empty()) throw DataError("no sentence ids in common with " + b_name);
  return out;
}

}  // namespace detail

// Subcommands -----------------------------------------------------------------

inline void cmd_annotate_pc(const PipelineConfig& cfg, std::ostream& out) {
  const auto corpus = detail::load_corpus(cfg.corpus, cfg.lemma_map);
  auto lex_in = io::open_input(cfg.lexicon);
  const auto lexicon = load_lexicon(lex_in, cfg.lexicon);
  const CentroidSet centroids = cfg.centroids.empty() ? CentroidSet{} : detail::load_centroids(cfg.centroids);
  const auto annotations = annotate_pc(corpus, lexicon, centroids);
  io::write_atomic(cfg.out, [&](std::ostream& o) { write_annotations(o, annotations); });
  const auto counts = class_counts(annotations);
  detail::write_summary(out, counts);
  if (!cfg.summary.empty()) {
    io::write_atomic(cfg.summary, [&](std::ostream& o) { detail::write_summary(o, counts); });
  }
}

inline void cmd_fit_gmm(const PipelineConfig& cfg, std::ostream& out) {
  const auto store = detail::load_store(cfg.embeddings);
  std::unordered_map<std::string, PcAnnotation> pc;
  for (auto& a : detail::load_annotations(cfg.annotations)) pc.emplace(a.sentence_id, a);
  const auto gold = io::read_labels(cfg.labels);
  std::vector<PcAnnotation> rows;
  std::vector<SentimentLabel> labels;
  for (const auto& g : gold) {
    auto it = pc.find(g.id);
    if (it == pc.end()) throw DataError("labelled sentence '" + g.id + "' has no PC annotation");
    rows.push_back(it->second);
    labels.push_back(g.label);
  }
  Eigen::MatrixXd features = build_features(store, rows);
  std::optional<FeatureScaling> scaling;
  if (cfg.standardize) {
    scaling = FeatureScaling::fit(features);
    scaling->apply(features);
  }

  GmmConfig base;
  base.seed = derive_seed(cfg.seed, "gmm");
  std::vector<GmmConfig> grid;
  if (cfg.grid.empty()) {
    grid = default_grid(base);
  } else {
    auto j = detail::load_json(cfg.grid);
    if (j.is_object() && j.contains("grid")) j = j["grid"];
    if (!j.is_array()) throw DataError(cfg.grid + ": expected a JSON array of GMM configs");
    for (const auto& c : j) grid.push_back(gmm_config_from_json(c, base));
  }
  const auto result = grid_search(features, labels, grid,
                                  cfg.present_only ? MacroAverage::GoldClasses : MacroAverage::AllClasses);

  ordered_json doc = to_json(result.best);
  if (scaling) {
    doc["feature_scaling"] = {
        {"mean", std::vector<double>(scaling->mean.data(), scaling->mean.data() + scaling->mean.size())},
        {"scale", std::vector<double>(scaling->scale.data(), scaling->scale.data() + scaling->scale.size())}};
  }
  ordered_json fit;
  fit["config"] = to_json(result.best_config);
  double best_score = -1.0;
  for (const auto& e : result.scores) best_score = std::max(best_score, e.score);
  fit["macro_f1"] = best_score;
  fit["iterations"] = result.best_report.iterations;
  fit["converged"] = result.best_report.converged;
  fit["final_log_likelihood"] = result.best_report.final_log_likelihood;
  doc["fit"] = std::move(fit);
  detail::write_json(cfg.out, doc);

  auto write_scores = [&](std::ostream& o) {
    o << "index\tcovariance_type\treg_covar\tn_init\tmacro_f1\n";
    for (std::size_t i = 0; i < result.scores.size(); ++i) {
      const auto& e = result.scores[i];
      o << i << '\t' << to_string(e.config.covariance_type) << '\t' << e.config.reg_covar << '\t'
        << e.config.n_init << '\t' << text::fixed(e.score) << '\n';
    }
  };
  write_scores(out);
  if (!cfg.scores.empty()) io::write_atomic(cfg.scores, write_scores);
}

inline void cmd_annotate_gmm(const PipelineConfig& cfg, std::ostream& out) {
  const auto store = detail::load_store(cfg.embeddings);
  auto annotations = detail::load_annotations(cfg.pc_annotations);
  const auto doc = detail::load_json(cfg.params);
  const auto params = gmm_params_from_json(doc);
  Eigen::MatrixXd features = build_features(store, annotations);
  if (doc.contains("feature_scaling")) {
    FeatureScaling s;
    const auto mean = doc["feature_scaling"].at("mean").get<std::vector<double>>();
    const auto scale = doc["feature_scaling"].at("scale").get<std::vector<double>>();
    s.mean = Eigen::Map<const Eigen::RowVectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    s.scale = Eigen::Map<const Eigen::RowVectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
    s.apply(features);
  }
  const auto labels = predict(params, features);
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    annotations[i].label = labels[i];
    annotations[i].alpha = 1.0;
  }
  io::write_atomic(cfg.out, [&](std::ostream& o) { write_annotations(o, annotations); });
  detail::write_summary(out, class_counts(annotations));
}

inline void cmd_split(const PipelineConfig& cfg, std::ostream& out) {
  const auto rows = io::read_labels(cfg.annotations);
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (const auto& r : rows) ids.push_back(r.id);
  const auto parts = split_items(ids, derive_seed(cfg.seed, "split"));
  const fs::path dir(cfg.out_dir);
  io::write_ids(dir / "train.txt", parts.train);
  io::write_ids(dir / "validation.txt", parts.validation);
  io::write_ids(dir / "test.txt", parts.test);
  out << "train\t" << parts.train.size() << "\nvalidation\t" << parts.validation.size()
      << "\ntest\t" << parts.test.size() << '\n';
}

inline void cmd_train(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto data = detail::load_training_data(cfg);
  const auto config = detail::train_config(cfg);
  const auto result = train(data.train, data.validation, config);
  for (const auto& w : result.report.warnings) err << "warning: " << w << '\n';
  detail::write_json(cfg.out, detail::model_document(result.params, config, result.report));
  if (!cfg.report.empty()) {
    ordered_json r = to_json(result.report);
    if (cfg.log_grad_norms) r["post_clip_grad_norms"] = result.report.post_clip_grad_norms;
    detail::write_json(cfg.report, r);
  }
  out << "epochs_run\t" << result.report.epochs_run << "\nbest_epoch\t"
      << result.report.best_epoch << "\nbest_dev_macro_f1\t"
      << text::fixed(result.report.best_dev_macro_f1) << '\n';
}

inline void cmd_search(const PipelineConfig& cfg, std::ostream& out) {
  const auto data = detail::load_training_data(cfg);
  if (data.test.empty()) throw DataError("search needs a non-empty test.txt in " + cfg.split_dir);
  const auto base = detail::train_config(cfg);
  SearchSpace space;
  space.min_learning_rate = cfg.min_lr;
  space.max_learning_rate = cfg.max_lr;
  const auto result = random_search(data.train, data.validation, data.test, cfg.trials,
                                    derive_seed(cfg.seed, "search"), base, space);
  const auto& best = result.trials[result.best_trial];
  detail::write_json(cfg.out, detail::model_document(result.best, best.config, result.best_report));
  if (!cfg.log.empty()) {
    io::write_atomic(cfg.log, [&](std::ostream& o) {
      for (const auto& t : result.trials) o << to_json(t).dump() << '\n';
    });
  }
  out << "trial\tlearning_rate\tlayers\thidden\tdev_macro_f1\teval_macro_f1\n";
  for (const auto& t : result.trials) {
    out << t.index << '\t' << t.config.learning_rate << '\t' << t.config.hidden_sizes.size() << '\t'
        << (t.config.hidden_sizes.empty() ? 0 : t.config.hidden_sizes.front()) << '\t'
        << text::fixed(t.dev_macro_f1) << '\t' << text::fixed(t.eval_macro_f1) << '\n';
  }
  out << "best\t" << result.best_trial << '\n';
}

inline void cmd_predict(const PipelineConfig& cfg, std::ostream& out) {
  const auto params = model_from_json(detail::load_json(cfg.model));
  const auto store = detail::load_store(cfg.embeddings);
  std::vector<std::string> ids;
  if (!cfg.ids.empty()) {
    ids = io::read_ids(cfg.ids);
  } else {
    for (const auto& r : store.records()) ids.push_back(r.sentence_id);
  }
  std::vector<std::pair<SentimentLabel, double>> preds;
  preds.reserve(ids.size());
  for (const auto& id : ids) {
    const auto& v = store.at(id);
    const auto p = forward(params, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    const auto label = argmax(p);
    preds.emplace_back(label, p[index_of(label)]);
  }
  io::write_atomic(cfg.out, [&](std::ostream& o) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      o << ids[i] << '\t' << to_string(preds[i].first) << '\t' << text::fixed(preds[i].second) << '\n';
    }
  });
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& p : preds) counts[index_of(p.first)] += 1;
  detail::write_summary(out, counts);
}

inline void cmd_evaluate(const PipelineConfig& cfg, std::ostream& out) {
  const auto gold_rows = io::read_labels(cfg.gold);
  const auto pred_rows = io::read_labels(cfg.pred);
  // Every prediction needs a gold label; gold may cover more sentences.
  std::vector<std::string> ids;
  const auto [pred, gold] = detail::join_labels(pred_rows, gold_rows, cfg.gold, true, &ids);
  const auto average = cfg.present_only ? MacroAverage::GoldClasses : MacroAverage::AllClasses;
  const auto matrix = confusion(gold, pred);
  const auto report = metrics(matrix, average);

  ordered_json doc = to_json(report);
  doc["n"] = gold.size();
  std::optional<GroupedReport> grouped;
  if (!cfg.groups.empty()) {
    const auto group_map = io::read_groups(cfg.groups);
    std::vector<std::string> groups;
    for (const auto& id : ids) {
      auto it = group_map.find(id);
      if (it == group_map.end()) throw DataError("no group for sentence '" + id + "'");
      groups.push_back(it->second);
    }
    grouped = grouped_macro(gold, pred, groups, average);
    ordered_json g = ordered_json::object();
    for (const auto& [name, s] : grouped->groups) {
      g[name] = {{"macro_f1", s.macro_f1}, {"support", s.support}};
    }
    doc["groups"] = std::move(g);
    doc["mean_group_macro_f1"] = grouped->mean_macro_f1;
  }

  write_confusion_table(out, matrix);
  out << doc.dump(2) << '\n';
  if (grouped) write_grouped_tsv(out, *grouped);
  if (!cfg.json_out.empty()) detail::write_json(cfg.json_out, doc);
  if (!cfg.confusion_out.empty()) {
    io::write_atomic(cfg.confusion_out, [&](std::ostream& o) { write_confusion_tsv(o, matrix); });
  }
  if (!cfg.grouped_out.empty() && grouped) {
    io::write_atomic(cfg.grouped_out, [&](std::ostream& o) { write_grouped_tsv(o, *grouped); });
  }
}

inline void cmd_agreement(const PipelineConfig& cfg, std::ostream& out) {
  const auto [a, b] = detail::join_labels(io::read_labels(cfg.a), io::read_labels(cfg.b), cfg.b, false);
  ordered_json doc = {{"kappa", cohen_kappa(a, b)}, {"n", a.size()}};
  out << doc.dump() << '\n';
  if (!cfg.out.empty()) detail::write_json(cfg.out, doc);
}

// Front end -------------------------------------------------------------------

namespace detail {

inline bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

inline void append_value(std::vector<std::string>& args, const std::string& flag, const json& v) {
  auto scalar = [](const json& x) {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_number_integer() || x.is_number_unsigned()) return x.dump();
    if (x.is_number()) return text::exact(x.get<double>());
    throw DataError("config: unsupported value for " + x.dump());
  };
  if (v.is_boolean()) {
    if (v.get<bool>()) args.push_back(flag);
  } else if (v.is_array()) {
    args.push_back(flag);
    for (const auto& x : v) args.push_back(scalar(x));
  } else if (!v.is_null()) {
    args.push_back(flag);
    args.push_back(scalar(v));
  }
}

/// Appends options from a --config JSON document that were not given on the
/// command line. Flat keys apply to every subcommand that has that option; an
/// object keyed by the subcommand name takes precedence over flat keys.
inline void merge_config(std::vector<std::string>& args, CLI::App& sub) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  const auto doc = load_json(path);
  if (!doc.is_object()) throw DataError(path + ": config must be a JSON object");
  const std::vector<std::string> given = args;
  auto apply = [&](const json& obj) {
    for (const auto& [key, value] : obj.items()) {
      const std::string flag = "--" + key;
      if (key == "config" || value.is_object()) continue;
      if (!sub.get_option_no_throw(flag) || has_flag(given, flag) || has_flag(args, flag)) continue;
      append_value(args, flag, value);
    }
  };
  if (doc.contains(sub.get_name()) && doc[sub.get_name()].is_object()) apply(doc[sub.get_name()]);
  apply(doc);
}

}  // namespace detail

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on usage errors and 2 on data or validation errors.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  PipelineConfig cfg;
  CLI::App app{"Sentence polarity annotation, GMM clustering and classifier training", "sentclust"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto add_config = [](CLI::App* s) {
    s->add_option("--config", "JSON document with option values; flags override it")
        ->check(CLI::ExistingFile);
  };
  auto add_seed = [&](CLI::App* s) { s->add_option("--seed", cfg.seed, "Master random seed"); };

  auto* annotate_pc = app.add_subcommand("annotate-pc", "Label sentences by polarity-coordinate clustering");
  annotate_pc->add_option("--corpus", cfg.corpus, "CoNLL-U files")->required()->check(CLI::ExistingFile)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  annotate_pc->add_option("--lexicon", cfg.lexicon, "Lexicon TSV (lemma, score)")->required()->check(CLI::ExistingFile);
  annotate_pc->add_option("--lemma-map", cfg.lemma_map, "Form-to-lemma TSV")->check(CLI::ExistingFile);
  annotate_pc->add_option("--centroids", cfg.centroids, "Centroid JSON")->check(CLI::ExistingFile);
  annotate_pc->add_option("--out", cfg.out, "Annotation TSV")->required();
  annotate_pc->add_option("--summary", cfg.summary, "Class-distribution TSV");

  auto* fit_gmm = app.add_subcommand("fit-gmm", "Grid-search a 4-component GMM on labelled sentences");
  fit_gmm->add_option("--embeddings", cfg.embeddings, "Embedding JSON-lines")->required()->check(CLI::ExistingFile);
  fit_gmm->add_option("--annotations", cfg.annotations, "PC annotation TSV")->required()->check(CLI::ExistingFile);
  fit_gmm->add_option("--labels", cfg.labels, "Gold label TSV (id, label)")->required()->check(CLI::ExistingFile);
  fit_gmm->add_option("--grid", cfg.grid, "JSON array of GMM configs")->check(CLI::ExistingFile);
  fit_gmm->add_option("--out", cfg.out, "GMM params JSON")->required();
  fit_gmm->add_option("--scores", cfg.scores, "Grid score TSV");
  fit_gmm->add_flag("--standardize", cfg.standardize, "Standardize feature columns");
  fit_gmm->add_flag("--present-only", cfg.present_only, "Macro-F1 over gold classes only");

  auto* annotate_gmm = app.add_subcommand("annotate-gmm", "Label sentences with a fitted GMM");
  annotate_gmm->add_option("--embeddings", cfg.embeddings, "Embedding JSON-lines")->required()->check(CLI::ExistingFile);
  annotate_gmm->add_option("--pc-annotations", cfg.pc_annotations, "PC annotation TSV")->required()->check(CLI::ExistingFile);
  annotate_gmm->add_option("--params", cfg.params, "GMM params JSON")->required()->check(CLI::ExistingFile);
  annotate_gmm->add_option("--out", cfg.out, "Annotation TSV")->required();

  auto* split = app.add_subcommand("split", "80/10/10 split of an annotation file");
  split->add_option("--annotations", cfg.annotations, "Annotation or label TSV")->required()->check(CLI::ExistingFile);
  split->add_option("--out-dir", cfg.out_dir, "Directory for train/validation/test id lists")->required();

  auto add_training = [&](CLI::App* s) {
    s->add_option("--annotations", cfg.annotations, "Label TSV (id, label, alpha)")->required()->check(CLI::ExistingFile);
    s->add_option("--embeddings", cfg.embeddings, "Embedding JSON-lines")->required()->check(CLI::ExistingFile);
    s->add_option("--split-dir", cfg.split_dir, "Directory written by 'split'")->required()->check(CLI::ExistingDirectory);
    s->add_option("--out", cfg.out, "Model JSON")->required();
    s->add_option("--loss", cfg.loss, "ce or gdw-ce")->check(CLI::IsMember({"ce", "gdw-ce"}));
    s->add_option("--batch-size", cfg.train.batch_size)->check(CLI::PositiveNumber);
    s->add_option("--max-epochs", cfg.train.max_epochs)->check(CLI::PositiveNumber);
    s->add_option("--patience", cfg.train.patience)->check(CLI::PositiveNumber);
    s->add_option("--clip-norm", cfg.train.clip_norm)->check(CLI::PositiveNumber);
    s->add_option("--hidden-size", cfg.hidden_size)->check(CLI::PositiveNumber);
    s->add_option("--layers", cfg.layers)->check(CLI::Range(0, 2));
  };
  auto* train_cmd = app.add_subcommand("train", "Train the softmax classifier");
  add_training(train_cmd);
  train_cmd->add_option("--lr", cfg.train.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  train_cmd->add_option("--report", cfg.report, "Training report JSON");
  train_cmd->add_flag("--log-grad-norms", cfg.log_grad_norms, "Record per-step gradient norms");

  auto* search = app.add_subcommand("search", "Random hyperparameter search");
  add_training(search);
  search->add_option("--trials", cfg.trials, "Number of trials")->check(CLI::PositiveNumber);
  search->add_option("--min-lr", cfg.min_lr)->check(CLI::PositiveNumber);
  search->add_option("--max-lr", cfg.max_lr)->check(CLI::PositiveNumber);
  search->add_option("--log", cfg.log, "Trial log JSON-lines");

  auto* predict_cmd = app.add_subcommand("predict", "Label sentences with a trained model");
  predict_cmd->add_option("--model", cfg.model, "Model JSON")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--embeddings", cfg.embeddings, "Embedding JSON-lines")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--ids", cfg.ids, "Sentence ids to predict, one per line")->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", cfg.out, "Prediction TSV")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Confusion matrix, F1 scores and per-group Macro-F1");
  evaluate->add_option("--gold", cfg.gold, "Gold label TSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--pred", cfg.pred, "Predicted label TSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--groups", cfg.groups, "Group TSV (id, group)")->check(CLI::ExistingFile);
  evaluate->add_option("--json", cfg.json_out, "Metrics JSON output");
  evaluate->add_option("--confusion", cfg.confusion_out, "Confusion matrix TSV output");
  evaluate->add_option("--grouped", cfg.grouped_out, "Grouped report TSV output");
  evaluate->add_flag("--present-only", cfg.present_only, "Macro-F1 over gold classes only");

  auto* agreement = app.add_subcommand("agreement", "Cohen's kappa between two labelings");
  agreement->add_option("--a", cfg.a, "First label TSV")->required()->check(CLI::ExistingFile);
  agreement->add_option("--b", cfg.b, "Second label TSV")->required()->check(CLI::ExistingFile);
  agreement->add_option("--out", cfg.out, "Kappa JSON output");

  for (auto* s : {annotate_pc, fit_gmm, annotate_gmm, split, train_cmd, search, predict_cmd,
                  evaluate, agreement}) {
    add_config(s);
  }
  for (auto* s : {fit_gmm, split, train_cmd, search}) add_seed(s);

  try {
    if (!args.empty()) {
      if (auto* sub = app.get_subcommand_no_throw(args.front())) detail::merge_config(args, *sub);
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* which = &app;
    for (const auto* s : app.get_subcommands()) which = s;
    err << which->help();
    return kExitUsage;
  }

  try {
    if (annotate_pc->parsed()) cmd_annotate_pc(cfg, out);
    else if (fit_gmm->parsed()) cmd_fit_gmm(cfg, out);
    else if (annotate_gmm->parsed()) cmd_annotate_gmm(cfg, out);
    else if (split->parsed()) cmd_split(cfg, out);
    else if (train_cmd->parsed()) cmd_train(cfg, out, err);
    else if (search->parsed()) cmd_search(cfg, out);
    else if (predict_cmd->parsed()) cmd_predict(cfg, out);
    else if (evaluate->parsed()) cmd_evaluate(cfg, out);
    else if (agreement->parsed()) cmd_agreement(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace sentclust::cli
