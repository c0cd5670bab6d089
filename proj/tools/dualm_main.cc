// dualm_main.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// \file
// Command-line driver: the full corpus -> models -> evaluation pipeline as
// subcommands. Every subcommand is a thin adapter over one library call
// path; randomized subcommands require --seed (or DUALM_SEED) and are
// bit-reproducible given it. Exit codes: 0 success, 1 domain error, 2 usage
// error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dualm/analysis.h"
#include "dualm/arpa.h"
#include "dualm/corpus.h"
#include "dualm/dlm.h"
#include "dualm/fst.h"
#include "dualm/ngram.h"
#include "dualm/synth.h"
#include "dualm/util.h"

namespace {

namespace fs = std::filesystem;
using namespace dualm;

TaggerConfig make_tagger(const std::string& policy, const std::string& cjk,
                         const std::string& vocab1_path,
                         const std::string& vocab2_path) {
  TaggerConfig cfg;
  if (policy == "explicit") {
    cfg.mode = TaggerConfig::Mode::kExplicitSuffix;
  } else if (policy == "script") {
    cfg.mode = TaggerConfig::Mode::kScriptHeuristic;
  } else if (policy == "vocab") {
    cfg.mode = TaggerConfig::Mode::kVocabFiles;
    if (vocab1_path.empty() || vocab2_path.empty()) {
      throw Error("--policy vocab requires --vocab1 and --vocab2");
    }
    cfg.vocab1 = read_vocab_file(vocab1_path);
    cfg.vocab2 = read_vocab_file(vocab2_path);
  } else {
    throw Error("unknown tagging policy \"" + policy + "\"");
  }
  auto lang = parse_language(cjk);
  if (!lang) throw Error("bad --cjk-lang \"" + cjk + "\"");
  cfg.cjk_lang = *lang;
  return cfg;
}

BackoffBigramModel estimate(const CountTable& counts,
                            const std::string& smoothing, int gt_cutoff) {
  if (smoothing == "mle") return estimate_mle(counts);
  if (smoothing == "gt") {
    GoodTuringOptions opts;
    opts.cutoff = gt_cutoff;
    std::vector<std::string> warnings;
    auto model = estimate_good_turing(counts, opts, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return model;
  }
  if (smoothing == "kn") return estimate_kneser_ney(counts);
  throw Error("unknown smoothing \"" + smoothing + "\"");
}

OovPolicy oov_policy(const std::string& name) {
  auto policy = parse_oov_policy(name);
  if (!policy) throw Error("unknown OOV policy \"" + name + "\"");
  return *policy;
}

LanguageId language(const std::string& name) {
  auto lang = parse_language(name);
  if (!lang) throw Error("bad language \"" + name + "\" (use L1 or L2)");
  return *lang;
}

void write_text_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

std::array<double, 3> parse_fractions(const std::string& spec) {
  std::array<double, 3> out{};
  std::istringstream ss(spec);
  std::string field;
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(ss, field, ',')) {
      throw Error("--fractions needs three comma-separated numbers");
    }
    out[i] = std::strtod(field.c_str(), nullptr);
  }
  return out;
}

// A model path is a DLM directory (manifest inside) or a single ARPA file.
bool is_dlm_dir(const std::string& path) {
  return fs::is_directory(path) && fs::exists(fs::path(path) / "manifest");
}

int run(CLI::App& app, int argc, char** argv) {
  argv = app.ensure_utf8(argv);
  app.require_subcommand(1);

  // ---- preprocess ----
  auto* preprocess = app.add_subcommand(
      "preprocess", "Tag a raw corpus and drop filtered utterances");
  struct {
    std::string in, out, report, policy = "explicit", cjk = "L1";
    std::string vocab1, vocab2, incomplete = "-";
    std::vector<std::string> patterns;
    bool drop_mixed = false, drop_unk = false;
  } pre;
  preprocess->add_option("--in", pre.in)->required();
  preprocess->add_option("--out", pre.out)->required();
  preprocess->add_option("--report", pre.report);
  preprocess->add_option("--policy", pre.policy)
      ->check(CLI::IsMember({"explicit", "script", "vocab"}));
  preprocess->add_option("--cjk-lang", pre.cjk);
  preprocess->add_option("--vocab1", pre.vocab1);
  preprocess->add_option("--vocab2", pre.vocab2);
  preprocess->add_option("--drop-pattern", pre.patterns);
  preprocess->add_flag("--drop-mixed-script", pre.drop_mixed);
  preprocess->add_flag("--drop-unk", pre.drop_unk);
  preprocess->add_option("--drop-incomplete-suffix", pre.incomplete,
                         "Empty string disables the filter");
  preprocess->callback([&] {
    auto tagger = make_tagger(pre.policy, pre.cjk, pre.vocab1, pre.vocab2);
    Corpus corpus = read_corpus_file(pre.in, tagger);
    FilterConfig filter;
    filter.drop_patterns = pre.patterns;
    filter.drop_mixed_script = pre.drop_mixed;
    filter.drop_unk_marker = pre.drop_unk;
    if (pre.incomplete.empty()) {
      filter.drop_incomplete_suffix.reset();
    } else {
      filter.drop_incomplete_suffix = pre.incomplete;
    }
    auto [kept, report] = filter_corpus(corpus, filter);
    write_corpus_file(kept, pre.out);
    write_text_output(pre.report, report.to_text());
  });

  // ---- split ----
  auto* split = app.add_subcommand(
      "split", "Speaker-disjoint train/dev/test split");
  struct {
    std::string in, train, dev, test, fractions = "0.6,0.2,0.2";
    uint64_t seed = 0;
  } sp;
  split->add_option("--in", sp.in)->required();
  split->add_option("--train", sp.train)->required();
  split->add_option("--dev", sp.dev)->required();
  split->add_option("--test", sp.test)->required();
  split->add_option("--fractions", sp.fractions);
  split->add_option("--seed", sp.seed)->required()->envname("DUALM_SEED");
  split->callback([&] {
    TaggerConfig tagger;  // written corpora always carry explicit tags
    Corpus corpus = read_corpus_file(sp.in, tagger);
    auto parts = split_by_speaker(corpus, parse_fractions(sp.fractions),
                                  sp.seed);
    write_corpus_file(parts[0], sp.train);
    write_corpus_file(parts[1], sp.dev);
    write_corpus_file(parts[2], sp.test);
  });

  // ---- derive ----
  auto* derive = app.add_subcommand(
      "derive", "Project one language, collapsing other-language spans to <sw>");
  struct {
    std::string in, out, keep = "L1";
  } de;
  derive->add_option("--in", de.in)->required();
  derive->add_option("--out", de.out)->required();
  derive->add_option("--keep", de.keep)->required();
  derive->callback([&] {
    Corpus corpus = read_corpus_file(de.in, TaggerConfig{});
    auto mc = derive_monolingual(corpus, language(de.keep));
    std::ofstream out(de.out, std::ios::binary);
    if (!out) throw Error("cannot write " + de.out);
    write_marker_corpus(mc, out);
  });

  // ---- train-mono ----
  auto* train_mono = app.add_subcommand(
      "train-mono", "Derive one language's marker corpus and fit a bigram model");
  struct {
    std::string in, out, keep = "L1", smoothing = "kn";
    int gt_cutoff = 7, threads = 0, digits = 12;
  } tm;
  train_mono->add_option("--in", tm.in)->required();
  train_mono->add_option("--out", tm.out)->required();
  train_mono->add_option("--keep", tm.keep)->required();
  train_mono->add_option("--smoothing", tm.smoothing)
      ->check(CLI::IsMember({"mle", "gt", "kn"}));
  train_mono->add_option("--gt-cutoff", tm.gt_cutoff);
  train_mono->add_option("--threads", tm.threads);
  train_mono->add_option(
      "--digits", tm.digits,
      "ARPA precision; 12 keeps downstream validation within 1e-9, 7 is the "
      "toolchain-standard interchange width");
  train_mono->callback([&] {
    Corpus corpus = read_corpus_file(tm.in, TaggerConfig{});
    auto mc = derive_monolingual(corpus, language(tm.keep));
    auto counts = count_corpus_parallel(mc.sentences, tm.threads);
    write_arpa_file(estimate(counts, tm.smoothing, tm.gt_cutoff), tm.out,
                    tm.digits);
  });

  // ---- train-mixed ----
  auto* train_mixed = app.add_subcommand(
      "train-mixed", "Fit the mixed baseline bigram model on raw token text");
  struct {
    std::string in, out, smoothing = "kn";
    int gt_cutoff = 7, threads = 0, digits = 12;
  } tx;
  train_mixed->add_option("--in", tx.in)->required();
  train_mixed->add_option("--out", tx.out)->required();
  train_mixed->add_option("--smoothing", tx.smoothing)
      ->check(CLI::IsMember({"mle", "gt", "kn"}));
  train_mixed->add_option("--gt-cutoff", tx.gt_cutoff);
  train_mixed->add_option("--threads", tx.threads);
  train_mixed->add_option("--digits", tx.digits);
  train_mixed->callback([&] {
    Corpus corpus = read_corpus_file(tx.in, TaggerConfig{});
    auto counts = count_corpus_parallel(surface_sentences(corpus), tx.threads);
    write_arpa_file(estimate(counts, tx.smoothing, tx.gt_cutoff), tx.out,
                    tx.digits);
  });

  // ---- combine ----
  auto* combine = app.add_subcommand(
      "combine", "Reweight two monolingual models into a condition-enforced DLM");
  struct {
    std::string lm1, lm2, out, smoothing = "unspecified", oov = "skip";
    uint64_t seed = 0;
  } cb;
  combine->add_option("--lm1", cb.lm1)->required();
  combine->add_option("--lm2", cb.lm2)->required();
  combine->add_option("--out", cb.out)->required();
  combine->add_option("--smoothing", cb.smoothing);
  combine->add_option("--oov", cb.oov)->check(CLI::IsMember({"skip", "closed"}));
  combine->add_option("--seed", cb.seed);
  combine->callback([&] {
    auto dlm = enforce_conditions(read_arpa_file(cb.lm1),
                                  read_arpa_file(cb.lm2));
    DlmManifest manifest;
    manifest.smoothing = cb.smoothing;
    manifest.oov_policy = cb.oov;
    manifest.seed = cb.seed;
    save_dlm(dlm, cb.out, manifest);
  });

  // ---- validate ----
  auto* validate_cmd = app.add_subcommand(
      "validate", "Check the four structural conditions and row sums");
  struct {
    std::string model;
  } va;
  validate_cmd->add_option("model", va.model)->required();
  validate_cmd->callback([&] {
    auto dlm = load_dlm(va.model);
    auto violations = validate(dlm);
    std::ostringstream out;
    for (const auto& v : violations) {
      out << "violation=" << v.condition << "\thistory=" << v.history
          << "\tresidual=" << format_full(v.residual) << "\n";
    }
    out << "violations=" << violations.size() << "\n";
    std::cout << out.str();
    if (!violations.empty()) throw Error("model failed validation");
  });

  // ---- ppl ----
  auto* ppl = app.add_subcommand(
      "ppl", "Perplexity of a DLM directory or mixed ARPA on an eval corpus");
  struct {
    std::string model, eval, out, oov, split_name, eval_format = "tagged";
    int threads = 0;
  } pp;
  ppl->add_option("--model", pp.model)->required();
  ppl->add_option("--eval", pp.eval)->required();
  ppl->add_option("--out", pp.out);
  ppl->add_option("--oov", pp.oov)->check(CLI::IsMember({"skip", "closed"}));
  ppl->add_option("--split-name", pp.split_name);
  ppl->add_option("--eval-format", pp.eval_format)
      ->check(CLI::IsMember({"tagged", "plain"}));
  ppl->add_option("--threads", pp.threads);
  ppl->callback([&] {
    EvalOptions opts;
    opts.split = pp.split_name.empty() ? fs::path(pp.eval).filename().string()
                                       : pp.split_name;
    EvalReport report;
    if (is_dlm_dir(pp.model)) {
      if (pp.eval_format != "tagged") {
        throw Error("DLM evaluation needs a tagged eval corpus");
      }
      DlmManifest manifest;
      auto dlm = load_dlm(pp.model, &manifest);
      opts.oov = oov_policy(pp.oov.empty() ? manifest.oov_policy : pp.oov);
      opts.model_name = "dlm";
      opts.smoothing = manifest.smoothing;
      Corpus eval_corpus = read_corpus_file(pp.eval, TaggerConfig{});
      report = evaluate_perplexity_parallel(dlm, eval_corpus, opts,
                                            pp.threads);
    } else {
      auto model = read_arpa_file(pp.model);
      opts.oov = oov_policy(pp.oov.empty() ? "skip" : pp.oov);
      opts.model_name = "mixed";
      opts.smoothing = smoothing_name(model.smoothing);
      Corpus eval_corpus;
      if (pp.eval_format == "tagged") {
        eval_corpus = read_corpus_file(pp.eval, TaggerConfig{});
      } else {
        // Plain token lines; tags are irrelevant for single-model scoring.
        for (auto& sent : read_sentences_file(pp.eval)) {
          Utterance utt;
          for (auto& w : sent) utt.tokens.push_back({std::move(w), LanguageId::L1});
          eval_corpus.add(std::move(utt));
        }
      }
      report = evaluate_perplexity_parallel(model, eval_corpus, opts,
                                            pp.threads);
    }
    write_text_output(pp.out, report.to_text());
  });

  // ---- compare ----
  auto* compare = app.add_subcommand(
      "compare", "Per-sentence mixed vs DLM perplexity table");
  struct {
    std::string mixed, dlm, eval, out, oov = "skip";
  } cp;
  compare->add_option("--mixed", cp.mixed)->required();
  compare->add_option("--dlm", cp.dlm)->required();
  compare->add_option("--eval", cp.eval)->required();
  compare->add_option("--out", cp.out);
  compare->add_option("--oov", cp.oov)->check(CLI::IsMember({"skip", "closed"}));
  compare->callback([&] {
    auto mixed = read_arpa_file(cp.mixed);
    auto dlm = load_dlm(cp.dlm);
    Corpus eval_corpus = read_corpus_file(cp.eval, TaggerConfig{});
    auto rows = compare_sentence_ppl(mixed, dlm, eval_corpus,
                                     oov_policy(cp.oov));
    std::ostringstream out;
    write_comparison_tsv(rows, out);
    write_text_output(cp.out, out.str());
  });

  // ---- sample ----
  auto* sample_cmd = app.add_subcommand(
      "sample", "Draw sentences from a DLM");
  struct {
    std::string model, out;
    uint64_t n = 10, seed = 0;
    std::size_t max_len = 100;
  } sa;
  sample_cmd->add_option("--model", sa.model)->required();
  sample_cmd->add_option("--n", sa.n);
  sample_cmd->add_option("--seed", sa.seed)->required()->envname("DUALM_SEED");
  sample_cmd->add_option("--max-len", sa.max_len);
  sample_cmd->callback([&] {
    auto dlm = load_dlm(sa.model);
    Corpus corpus = generate_corpus(dlm, sa.n, sa.seed, 0, sa.max_len);
    std::ostringstream out;
    write_corpus(corpus, out);
    write_text_output(sa.out, out.str());
  });

  // ---- export-fst ----
  auto* export_fst = app.add_subcommand(
      "export-fst", "Compile a model into an AT&T text acceptor");
  struct {
    std::string model, out;
  } ef;
  export_fst->add_option("--model", ef.model)->required();
  export_fst->add_option("--out", ef.out, "Output prefix")->required();
  export_fst->callback([&] {
    WeightedAcceptor fsa;
    if (is_dlm_dir(ef.model)) {
      fsa = export_dlm_fst(load_dlm(ef.model));
    } else {
      fsa = export_mixed_fst(read_arpa_file(ef.model));
    }
    write_acceptor_files(fsa, ef.out);
  });

  // ---- export-arpa ----
  auto* export_arpa = app.add_subcommand(
      "export-arpa", "Re-serialize a model (or one DLM component) as ARPA");
  struct {
    std::string model, out;
    int component = 1, digits = 7;
  } ea;
  export_arpa->add_option("--model", ea.model)->required();
  export_arpa->add_option("--out", ea.out)->required();
  export_arpa->add_option("--component", ea.component)
      ->check(CLI::IsMember({1, 2}));
  export_arpa->add_option("--digits", ea.digits);
  export_arpa->callback([&] {
    BackoffBigramModel model;
    if (is_dlm_dir(ea.model)) {
      auto dlm = load_dlm(ea.model);
      model = ea.component == 1 ? dlm.lm1.model : dlm.lm2.model;
    } else {
      model = read_arpa_file(ea.model);
    }
    write_arpa_file(model, ea.out, ea.digits);
  });

  // ---- analyze ----
  auto* analyze = app.add_subcommand(
      "analyze", "Switch-bigram statistics and frequency histograms");
  struct {
    std::string in, out;
  } an;
  analyze->add_option("--in", an.in)->required();
  analyze->add_option("--out", an.out, "Output prefix")->required();
  analyze->callback([&] {
    Corpus corpus = read_corpus_file(an.in, TaggerConfig{});
    write_file(an.out + ".switch.txt",
               switch_bigram_stats(corpus).to_text());
    auto sentences = surface_sentences(corpus);
    write_file(an.out + ".freq1.tsv",
               freq_fraction_histogram(sentences, 1).to_tsv());
    try {
      write_file(an.out + ".freq3.tsv",
                 freq_fraction_histogram(sentences, 3).to_tsv());
    } catch (const Error& e) {
      std::cerr << "warning: skipping trigram histogram: " << e.what()
                << "\n";
    }
  });

  // ---- synth ----
  auto* synth = app.add_subcommand(
      "synth", "Generate a corpus from a parameterized ground-truth DLM");
  struct {
    std::string out, truth_out, preset;
    GroundTruthSpec spec;
    uint64_t n = 1000, seed = 0;
    std::size_t speakers = 0, max_len = 100;
    int threads = 0;
  } sy;
  synth->add_option("--out", sy.out)->required();
  synth->add_option("--truth-out", sy.truth_out,
                    "Also save the generating DLM directory");
  synth->add_option("--sentences", sy.n);
  synth->add_option("--seed", sy.seed)->required()->envname("DUALM_SEED");
  synth->add_option("--preset", sy.preset)
      ->check(CLI::IsMember({"sparse-switch"}));
  synth->add_option("--v1", sy.spec.vocab1_size);
  synth->add_option("--v2", sy.spec.vocab2_size);
  synth->add_option("--switch-low", sy.spec.switch_rate_low);
  synth->add_option("--switch-high", sy.spec.switch_rate_high);
  synth->add_option("--eos-low", sy.spec.eos_rate_low);
  synth->add_option("--eos-high", sy.spec.eos_rate_high);
  synth->add_option("--start-balance", sy.spec.start_balance);
  synth->add_option("--concentration", sy.spec.concentration);
  synth->add_option("--speakers", sy.speakers);
  synth->add_option("--max-len", sy.max_len);
  synth->add_option("--threads", sy.threads);
  synth->callback([&] {
    GroundTruthSpec spec = sy.spec;
    if (sy.preset == "sparse-switch") spec = sparse_switch_preset(sy.seed);
    spec.seed = sy.seed;
    auto truth = make_ground_truth(spec);
    auto corpus = generate_corpus_parallel(truth, sy.n, sy.seed + 1,
                                           sy.speakers, sy.max_len,
                                           sy.threads);
    write_corpus_file(corpus, sy.out);
    if (!sy.truth_out.empty()) {
      DlmManifest manifest;
      manifest.smoothing = "mle";
      manifest.seed = sy.seed;
      save_dlm(truth, sy.truth_out, manifest);
    }
  });

  app.parse(argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual language model toolkit"};
  try {
    return run(app, argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      return app.exit(e);
    }
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const dualm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
