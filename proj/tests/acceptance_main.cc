// Acceptance suite: runs the toolkit's exit criteria end to end and prints
// one PASS/FAIL line per criterion. Exits nonzero when any criterion fails.
//
// argv[1] (optional): path to the CLI binary, used by the determinism
// criterion; when absent that criterion fails with a note.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dualm/analysis.h"
#include "dualm/arpa.h"
#include "dualm/corpus.h"
#include "dualm/dlm.h"
#include "dualm/fst.h"
#include "dualm/ngram.h"
#include "dualm/random.h"
#include "dualm/synth.h"
#include "dualm/util.h"

namespace fs = std::filesystem;
using namespace dualm;
using Clock = std::chrono::steady_clock;

namespace {

struct Runner {
  int failures = 0;

  void criterion(int number, const std::string& title, double budget_seconds,
                 const std::function<void()>& body) {
    auto start = Clock::now();
    std::string failure;
    try {
      body();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    double elapsed =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (failure.empty() && budget_seconds > 0 && elapsed > budget_seconds) {
      failure = "runtime " + format_fixed(elapsed, 1) + "s exceeds budget " +
                format_fixed(budget_seconds, 0) + "s";
    }
    if (failure.empty()) {
      std::printf("PASS criterion %2d: %s (%.1fs)\n", number, title.c_str(),
                  elapsed);
    } else {
      ++failures;
      std::printf("FAIL criterion %2d: %s (%.1fs) -- %s\n", number,
                  title.c_str(), elapsed, failure.c_str());
    }
    std::fflush(stdout);
  }
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

void require_close(double actual, double expected, double tol,
                   const std::string& what) {
  if (!(std::abs(actual - expected) <= tol)) {
    throw Error(what + ": got " + format_full(actual) + ", want " +
                format_full(expected) + " within " + format_full(tol));
  }
}

// ---- shared fixtures ----

Corpus toy_corpus() {
  Corpus corpus;
  corpus.add(Utterance{{{"a", LanguageId::L1}, {"b", LanguageId::L1}}, "sA"});
  corpus.add(Utterance{{{"a", LanguageId::L1}, {"x", LanguageId::L2}}, "sB"});
  corpus.add(Utterance{{{"x", LanguageId::L2}, {"a", LanguageId::L1}}, "sC"});
  return corpus;
}

CountTable toy_counts(LanguageId keep) {
  auto mc = derive_monolingual(toy_corpus(), keep);
  return count_corpus(mc.sentences);
}

DualLM toy_mle_dlm() {
  return enforce_conditions(estimate_mle(toy_counts(LanguageId::L1)),
                            estimate_mle(toy_counts(LanguageId::L2)));
}

Corpus random_tagged_corpus(Rng& rng, std::size_t v1, std::size_t v2,
                            std::size_t n_sentences, std::size_t max_len) {
  Corpus corpus;
  for (std::size_t i = 0; i < n_sentences; ++i) {
    Utterance utt;
    std::size_t len = 1 + rng.below(max_len);
    for (std::size_t j = 0; j < len; ++j) {
      if (rng.uniform() < 0.6) {
        utt.tokens.push_back(
            {"a" + std::to_string(rng.below(v1)), LanguageId::L1});
      } else {
        utt.tokens.push_back(
            {"b" + std::to_string(rng.below(v2)), LanguageId::L2});
      }
    }
    corpus.add(std::move(utt));
  }
  return corpus;
}

DualLM train_dlm(const Corpus& corpus, int smoothing_kind) {
  auto d1 = derive_monolingual(corpus, LanguageId::L1);
  auto d2 = derive_monolingual(corpus, LanguageId::L2);
  auto t1 = count_corpus(d1.sentences);
  auto t2 = count_corpus(d2.sentences);
  auto fit = [&](const CountTable& t) {
    switch (smoothing_kind) {
      case 0: return estimate_mle(t);
      case 1: return estimate_good_turing(t);
      default: return estimate_kneser_ney(t);
    }
  };
  return enforce_conditions(fit(t1), fit(t2));
}

double combined_row_sum(const DualLM& dlm, const std::string& history) {
  std::vector<double> terms;
  for (const auto& w : dlm.vocab1) {
    terms.push_back(combined_prob(dlm, history, w));
  }
  for (const auto& w : dlm.vocab2) {
    terms.push_back(combined_prob(dlm, history, w));
  }
  terms.push_back(combined_prob(dlm, history, kSentEnd));
  return compensated_sum(terms);
}

std::map<std::pair<std::string, std::string>, double> read_golden(
    const std::string& name) {
  std::string text = read_file(std::string(DUALM_GOLDEN_DIR) + "/" + name);
  std::map<std::pair<std::string, std::string>, double> entries;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto fields = split_whitespace(line);
    if (fields.size() == 3) {
      entries[{fields[0], fields[1]}] =
          std::strtod(fields[2].c_str(), nullptr);
    }
  }
  return entries;
}

int run_cli(const std::string& bin, const std::string& args,
            const std::string& out_path) {
  std::string cmd = bin + " " + args + " >" + out_path + " 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli_bin = argc > 1 ? argv[1] : "";
  Runner runner;

  // 1 -- every combined-model history row of randomized trained DLMs sums
  // to 1 within 1e-9.
  runner.criterion(1, "combined-model normalization over 200 random DLMs", 30, [&] {
    Rng rng(424242);
    int built = 0;
    int attempts = 0;
    while (built < 200) {
      require(++attempts < 600, "too many degenerate corpus draws");
      std::size_t v1 = 2 + rng.below(14);  // total content vocab <= 30
      std::size_t v2 = 2 + rng.below(14);
      auto corpus =
          random_tagged_corpus(rng, v1, v2, 40 + rng.below(200), 10);
      DualLM dlm;
      try {
        dlm = train_dlm(corpus, attempts % 3);
      } catch (const Error&) {
        continue;  // e.g. undefined KN discount on a degenerate draw
      }
      ++built;
      require(std::abs(combined_row_sum(dlm, kSentStart) - 1.0) <= 1e-9,
              "start row sum off");
      for (const auto& w : dlm.vocab1) {
        require(std::abs(combined_row_sum(dlm, w) - 1.0) <= 1e-9,
                "row sum off at " + w);
      }
      for (const auto& w : dlm.vocab2) {
        require(std::abs(combined_row_sum(dlm, w) - 1.0) <= 1e-9,
                "row sum off at " + w);
      }
    }
  });

  // 2 -- hand-computed exact values on the toy corpus.
  runner.criterion(2, "toy-corpus exactness (MLE + reweighting)", 0, [&] {
    auto dlm = toy_mle_dlm();
    require_close(combined_prob(dlm, kSentStart, "a"), 2.0 / 3, 1e-9,
                  "P[a|<s>]");
    require_close(combined_prob(dlm, "a", "x"), 1.0 / 3, 1e-9, "P[x|a]");
    std::vector<TaggedToken> ax{{"a", LanguageId::L1}, {"x", LanguageId::L2}};
    require_close(std::exp(score_sentence(dlm, ax).total_logprob), 1.0 / 9,
                  1e-9, "P(\"a x\")");
    Corpus ab;
    ab.add(Utterance{{{"a", LanguageId::L1}, {"b", LanguageId::L1}}, ""});
    EvalOptions opts;
    require_close(evaluate_perplexity(dlm, ab, opts).ppl,
                  std::pow(4.5, 1.0 / 3), 1e-9, "ppl(\"a b\")");
  });

  // 3 -- smoothing estimators vs committed golden files, plus convergence
  // to MLE on high-count rows.
  runner.criterion(3, "smoothing oracles and large-sample MLE convergence", 0, [&] {
    for (auto [lang, gt_file, kn_file] :
         {std::tuple{LanguageId::L1, "gt_d1.txt", "kn_d1.txt"},
          std::tuple{LanguageId::L2, "gt_d2.txt", "kn_d2.txt"}}) {
      auto counts = toy_counts(lang);
      auto gt = estimate_good_turing(counts);
      auto kn = estimate_kneser_ney(counts);
      for (const auto& [hw, expected] : read_golden(gt_file)) {
        require_close(std::exp(gt.cond_logprob(hw.first, hw.second)),
                      expected, 1e-9,
                      std::string(gt_file) + " P[" + hw.second + "|" +
                          hw.first + "]");
      }
      for (const auto& [hw, expected] : read_golden(kn_file)) {
        require_close(std::exp(kn.cond_logprob(hw.first, hw.second)),
                      expected, 1e-9,
                      std::string(kn_file) + " P[" + hw.second + "|" +
                          hw.first + "]");
      }
    }

    // Large-sample rows: smoothing moves < 1% of the row mass.
    Rng rng(271828);
    std::vector<std::vector<std::string>> sentences;
    for (int s = 0; s < 40000; ++s) {
      std::vector<std::string> sent;
      std::size_t len = 3 + rng.below(6);
      for (std::size_t j = 0; j < len; ++j) {
        double u = rng.uniform();
        auto idx = static_cast<std::size_t>(std::pow(u, 6.0) * 40);
        sent.push_back("w" + std::to_string(std::min<std::size_t>(idx, 39)));
      }
      if (s < 50) sent.push_back("rare" + std::to_string(s));
      sentences.push_back(std::move(sent));
    }
    auto t = count_corpus_parallel(sentences);
    auto mle = estimate_mle(t);
    auto gt = estimate_good_turing(t);
    auto kn = estimate_kneser_ney(t);
    int rows = 0;
    for (const auto& [h, row] : t.bigram) {
      if (t.history_total(h) < 10000) continue;
      ++rows;
      double tv_gt = 0, tv_kn = 0;
      for (const auto& w : mle.target_words()) {
        double pm = std::exp(mle.cond_logprob(h, w));
        tv_gt += std::abs(std::exp(gt.cond_logprob(h, w)) - pm);
        tv_kn += std::abs(std::exp(kn.cond_logprob(h, w)) - pm);
      }
      require(tv_gt / 2 < 0.01, "GT row " + h + " deviates >1% from MLE");
      require(tv_kn / 2 < 0.01, "KN row " + h + " deviates >1% from MLE");
    }
    require(rows >= 3, "not enough high-count rows to test");
  });

  // 4 -- enumeration behavior and FST-vs-direct equivalence.
  runner.criterion(4, "enumeration mass and FST equivalence", 0, [&] {
    auto dlm = toy_mle_dlm();
    auto table = enumerate_mass(dlm, 20);
    double prev = 0;
    for (std::size_t len = 1; len <= 20; ++len) {
      double cum = table.cumulative(len);
      require(cum >= prev, "mass not monotone");
      require(cum <= 1.0 + 1e-9, "mass exceeds 1");
      prev = cum;
    }
    require(table.total >= 0.99, "mass(20) below 0.99");

    // Exhaustive equivalence on a 4-word vocabulary, lengths 1..4.
    Rng rng(2024);
    auto corpus = random_tagged_corpus(rng, 2, 2, 150, 8);
    auto trained = train_dlm(corpus, 1);  // Good-Turing: full backoff support
    require(trained.vocab1.size() + trained.vocab2.size() == 4,
            "fixture vocabulary must be 4 words");
    auto fsa = export_dlm_fst(trained);
    std::vector<std::string> words(trained.vocab1.begin(),
                                   trained.vocab1.end());
    words.insert(words.end(), trained.vocab2.begin(), trained.vocab2.end());

    std::function<void(std::vector<std::string>&)> check_sentence =
        [&](std::vector<std::string>& sentence) {
          std::vector<TaggedToken> tagged;
          for (const auto& w : sentence) {
            tagged.push_back({w, *trained.lang_of(w)});
          }
          double direct = score_sentence(trained, tagged).total_logprob;
          auto path = score_path(fsa, sentence);
          if (direct == kNegInf) {
            require(!path.accepted, "FST accepts a zero-probability sentence");
          } else {
            require(path.accepted, "FST rejects a possible sentence");
            require(std::abs(path.weight - (-direct)) <= 1e-6,
                    "FST weight mismatch");
          }
        };

    std::vector<std::string> sentence;
    std::function<void(std::size_t)> recurse = [&](std::size_t remaining) {
      if (!sentence.empty()) check_sentence(sentence);
      if (remaining == 0) return;
      for (const auto& w : words) {
        sentence.push_back(w);
        recurse(remaining - 1);
        sentence.pop_back();
      }
    };
    recurse(4);

    for (int trial = 0; trial < 1000; ++trial) {
      std::size_t len = 5 + rng.below(10);
      sentence.clear();
      for (std::size_t i = 0; i < len; ++i) {
        sentence.push_back(words[rng.below(words.size())]);
      }
      check_sentence(sentence);
    }
  });

  // 5 -- all-L1 sentences score identically under the DLM and lm1.
  runner.criterion(5, "monolingual reduction within 1e-12", 0, [&] {
    Rng rng(31337);
    auto corpus = random_tagged_corpus(rng, 8, 8, 80, 10);
    auto dlm = train_dlm(corpus, 2);
    std::vector<std::string> v1(dlm.vocab1.begin(), dlm.vocab1.end());
    for (int trial = 0; trial < 1000; ++trial) {
      std::size_t len = 1 + rng.below(10);
      std::vector<TaggedToken> tagged;
      std::vector<std::string> plain;
      for (std::size_t i = 0; i < len; ++i) {
        const auto& w = v1[rng.below(v1.size())];
        tagged.push_back({w, LanguageId::L1});
        plain.push_back(w);
      }
      double a = score_sentence(dlm, tagged).total_logprob;
      double b = score_sentence(dlm.lm1.model, plain).total_logprob;
      if (a == kNegInf || b == kNegInf) {
        require(a == b, "zero/nonzero disagreement");
      } else {
        require(std::abs(a - b) <= 1e-12, "reduction mismatch");
      }
    }
  });

  // 6 -- ARPA round trip: log10 drift and perplexity preservation.
  runner.criterion(6, "ARPA round-trip precision", 0, [&] {
    constexpr double kLn10 = 2.302585092994045684;
    Rng rng(5150);
    auto corpus = random_tagged_corpus(rng, 8, 5, 150, 10);
    auto eval_corpus = random_tagged_corpus(rng, 8, 5, 50, 10);
    for (int kind = 0; kind < 3; ++kind) {
      auto t = count_corpus(surface_sentences(corpus));
      BackoffBigramModel m = kind == 0   ? estimate_mle(t)
                             : kind == 1 ? estimate_good_turing(t)
                                         : estimate_kneser_ney(t);
      std::ostringstream out;
      write_arpa(m, out);
      std::istringstream in(out.str());
      auto back = read_arpa(in);
      for (const auto& [h, row] : m.rows) {
        for (const auto& w : m.target_words()) {
          double la = m.cond_logprob(h, w);
          double lb = back.cond_logprob(h, w);
          if (la == kNegInf || lb == kNegInf) {
            require(la == lb, "zero mismatch after round trip");
          } else {
            require(std::abs(la - lb) / kLn10 <= 5e-7,
                    "log10 drift beyond 5e-7");
          }
        }
      }
      EvalOptions opts;
      double p1 = evaluate_perplexity(m, eval_corpus, opts).ppl;
      double p2 = evaluate_perplexity(back, eval_corpus, opts).ppl;
      if (std::isinf(p1) || std::isinf(p2)) {
        // MLE zeros: a round trip must preserve the infinite perplexity.
        require(std::isinf(p1) && std::isinf(p2),
                "round trip changed an infinite perplexity");
      } else {
        require(std::abs(p1 - p2) / p1 <= 1e-5,
                "perplexity drift beyond 1e-5 relative");
      }
    }
  });

  // 7 -- sparse-switch synthetic preset: DLM beats the mixed model under
  // Kneser-Ney and the gap widens as training data shrinks.
  runner.criterion(7, "trend reproduction on the sparse-switch preset", 120, [&] {
    const uint64_t seed = 20240801;
    auto truth = make_ground_truth(sparse_switch_preset(seed));
    auto train = generate_corpus_parallel(truth, 10000, seed + 1, 0);
    auto test = generate_corpus_parallel(truth, 2000, seed + 2, 0);
    auto run_at = [&](std::size_t n) {
      Corpus sub;
      for (std::size_t i = 0; i < n; ++i) sub.add(train.utterances[i]);
      auto mixed =
          estimate_kneser_ney(count_corpus_parallel(surface_sentences(sub)));
      auto dlm = train_dlm(sub, 2);
      EvalOptions opts;
      double pm = evaluate_perplexity_parallel(mixed, test, opts).ppl;
      double pd = evaluate_perplexity_parallel(dlm, test, opts).ppl;
      return std::pair{pm, pd};
    };
    auto [pm_full, pd_full] = run_at(10000);
    auto [pm_half, pd_half] = run_at(5000);
    auto [pm_third, pd_third] = run_at(3333);
    require(pd_full < pm_full,
            "DLM (" + format_fixed(pd_full, 4) + ") not below mixed (" +
                format_fixed(pm_full, 4) + ") on full data");
    double gap_full = (pm_full - pd_full) / pm_full;
    double gap_third = (pm_third - pd_third) / pm_third;
    require(gap_third > gap_full,
            "gap at 1/3 (" + format_fixed(100 * gap_third, 2) +
                "%) does not exceed gap at full (" +
                format_fixed(100 * gap_full, 2) + "%)");
    require(pm_full <= pm_half && pm_half <= pm_third,
            "mixed perplexity not nonincreasing in training size");
    require(pd_full <= pd_half && pd_half <= pd_third,
            "DLM perplexity not nonincreasing in training size");
  });

  // 8 -- a DLM refit on 100k generated sentences matches the generator's
  // held-out cross-entropy within 5%.
  runner.criterion(8, "sampler/estimator consistency at 100k sentences", 0, [&] {
    GroundTruthSpec spec;
    spec.vocab1_size = 30;
    spec.vocab2_size = 25;
    spec.switch_rate_low = 0.06;
    spec.switch_rate_high = 0.14;
    spec.concentration = 0.4;
    spec.seed = 555;
    auto truth = make_ground_truth(spec);
    auto train = generate_corpus_parallel(truth, 100000, 1000, 0);
    auto held = generate_corpus_parallel(truth, 20000, 2000, 0);
    auto refit = train_dlm(train, 2);
    EvalOptions opts;
    double h_fit =
        std::log(evaluate_perplexity_parallel(refit, held, opts).ppl);
    double h_true =
        std::log(evaluate_perplexity_parallel(truth, held, opts).ppl);
    require(std::abs(h_fit - h_true) / h_true <= 0.05,
            "cross-entropy drift " +
                format_fixed(100 * std::abs(h_fit - h_true) / h_true, 3) +
                "% exceeds 5%");
  });

  // 9 -- analysis matches hand counts exactly; histograms stay monotone.
  runner.criterion(9, "analysis hand counts and monotonicity", 0, [&] {
    auto stats = switch_bigram_stats(toy_corpus());
    require(stats.total_types == 2, "toy switch types");
    require(stats.defined, "toy stats defined");
    require(stats.fraction_singleton == 1.0, "toy singleton fraction");
    require(stats.fraction_count_le.at(10) == 1.0, "toy fraction <= 10");

    auto hist = freq_fraction_histogram(surface_sentences(toy_corpus()), 1);
    require_close(hist.buckets.at(1), 0.5, 1e-15, "toy bucket 1");
    require_close(hist.buckets.at(2), 1.0, 1e-15, "toy bucket 2");

    Rng rng(808);
    for (int trial = 0; trial < 25; ++trial) {
      auto corpus = random_tagged_corpus(rng, 8, 8, 60, 12);
      for (int order : {1, 3}) {
        auto h = freq_fraction_histogram(surface_sentences(corpus), order);
        double prev = 0;
        for (const auto& [bucket, fraction] : h.buckets) {
          require(fraction >= prev - 1e-15, "histogram not monotone");
          prev = fraction;
        }
        require_close(prev, 1.0, 1e-12, "final bucket");
      }
    }
  });

  // 10 -- the full CLI pipeline on the toy corpus is byte-reproducible and
  // matches the committed report.
  runner.criterion(10, "CLI pipeline determinism and golden report", 0, [&] {
    require(!cli_bin.empty(), "CLI binary path not supplied (argv[1])");
    auto dir = fs::temp_directory_path() / "dualm_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const std::string& name) { return (dir / name).string(); };
    write_file(p("toy.txt"),
               "sA\ta|L1 b|L1\nsB\ta|L1 x|L2\nsC\tx|L2 a|L1\n");

    auto cli = [&](const std::string& args, const std::string& tag) {
      int code = run_cli(cli_bin, args, p(tag));
      require(code == 0, "CLI step failed: " + args);
    };
    for (int round = 0; round < 2; ++round) {
      std::string suffix = std::to_string(round);
      cli("train-mono --keep L1 --smoothing mle --in " + p("toy.txt") +
              " --out " + p("lm1_" + suffix + ".arpa"),
          "t1_" + suffix);
      cli("train-mono --keep L2 --smoothing mle --in " + p("toy.txt") +
              " --out " + p("lm2_" + suffix + ".arpa"),
          "t2_" + suffix);
      cli("combine --smoothing mle --lm1 " + p("lm1_" + suffix + ".arpa") +
              " --lm2 " + p("lm2_" + suffix + ".arpa") + " --out " +
              p("dlm_" + suffix),
          "cb_" + suffix);
      cli("validate " + p("dlm_" + suffix), "va_" + suffix);
      cli("ppl --split-name toy --model " + p("dlm_" + suffix) + " --eval " +
              p("toy.txt") + " --out " + p("ppl_" + suffix + ".txt"),
          "pp_" + suffix);
      cli("export-fst --model " + p("dlm_" + suffix) + " --out " +
              p("fst_" + suffix),
          "ef_" + suffix);
    }
    require(read_file(p("lm1_0.arpa")) == read_file(p("lm1_1.arpa")),
            "train-mono output differs across runs");
    require(read_file(p("ppl_0.txt")) == read_file(p("ppl_1.txt")),
            "ppl output differs across runs");
    require(read_file(p("fst_0.fst.txt")) == read_file(p("fst_1.fst.txt")),
            "FST export differs across runs");
    require(read_file(p("va_0")) == "violations=0\n", "validation not clean");
    // Committed golden: ppl("a b","a x","x a") = 729^(1/9) = 2.080084.
    std::string expected =
        "model=dlm\nsmoothing=mle\nsplit=toy\nppl=2.080084\noov_count=0\n"
        "tokens=9\n";
    require(read_file(p("ppl_0.txt")) == expected,
            "report does not match the committed oracle");
    fs::remove_all(dir);
  });

  if (runner.failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", runner.failures);
  }
  return runner.failures == 0 ? 0 : 1;
}
