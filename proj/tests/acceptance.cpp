// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Every tolerance and time budget is fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "test_support.hpp"
#include "wordmap/corpus_diff.hpp"
#include "wordmap/embedding_store.hpp"
#include "wordmap/map_export.hpp"
#include "wordmap/pipeline.hpp"
#include "wordmap/tokenizer.hpp"
#include "wordmap/tsne.hpp"

namespace {

using namespace wordmap;
namespace fs = std::filesystem;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_seconds, const std::function<Outcome()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (elapsed > budget_seconds) {
    out.pass = false;
    out.detail += "; over time budget";
  }
  if (!out.pass) ++failures;
  std::printf("%s  %-26s %.2fs/%gs  %s\n", out.pass ? "PASS" : "FAIL", name, elapsed,
              budget_seconds, out.detail.c_str());
  std::fflush(stdout);
}

std::string fixture(const std::string& name) { return std::string(WORDMAP_FIXTURES) + "/" + name; }

Outcome model_roundtrip() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> vocab(1, 100);
  std::uniform_int_distribution<std::size_t> dim(1, 50);
  for (int i = 0; i < 20; ++i) {
    const auto model = testing::random_model(rng, vocab(rng), dim(rng));
    const std::string bytes = embed::serialize_binary(model);
    const auto back = embed::parse_binary(bytes);
    if (!(back == model)) return {false, "model " + std::to_string(i) + " changed"};
    if (embed::serialize_binary(back) != bytes) return {false, "bytes differ for model " + std::to_string(i)};
  }
  return {true, "20 models bitwise identical"};
}

Outcome gradient_check() {
  // |analytic - numeric| <= 1e-4 |numeric| + 1e-7, central differences h = 1e-5.
  std::mt19937_64 rng(103);
  double worst = 0.0;
  for (std::size_t n : {5u, 10u, 20u}) {
    for (std::size_t d : {3u, 300u}) {
      const Matrix x = testing::random_matrix(rng, n, d);
      const double perplexity = std::min(5.0, (double(n) - 1.0) / 2.0);
      const Matrix p =
          tsne::calibrate_affinities(tsne::pairwise_squared_distances(x), perplexity).p;
      const Matrix y = testing::random_matrix(rng, n, 2);
      const auto low = tsne::low_dim_affinities(y);
      const Matrix g = tsne::gradient(p, low.q, low.numerators, y);
      const Matrix fd = testing::numeric_gradient(p, y, 1e-5);
      for (std::size_t k = 0; k < g.data().size(); ++k) {
        const double err = std::abs(g.data()[k] - fd.data()[k]);
        const double allowed = 1e-4 * std::abs(fd.data()[k]) + 1e-7;
        worst = std::max(worst, err / allowed);
        if (err > allowed) {
          return {false, "n=" + std::to_string(n) + " d=" + std::to_string(d) + " error " +
                             std::to_string(err)};
        }
      }
    }
  }
  return {true, "worst error/allowed " + std::to_string(worst)};
}

Outcome affinity_calibration() {
  // Symmetric, zero diagonal, non-negative, sums to 1 within 1e-12, and every
  // row's perplexity re-derived from its sigma is within 1e-5 in log2.
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<std::size_t> size(10, 60);
  std::uniform_int_distribution<std::size_t> dims(2, 30);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t n = size(rng);
    const Matrix x = testing::random_matrix(rng, n, dims(rng), scale(rng));
    const double perplexity = std::uniform_real_distribution<double>(2.0, (n - 1) / 3.0)(rng);
    const Matrix d = tsne::pairwise_squared_distances(x);
    const auto a = tsne::calibrate_affinities(d, perplexity);
    const std::string tag = "instance " + std::to_string(instance) + ": ";
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (a.p(i, i) != 0.0) return {false, tag + "non-zero diagonal"};
      for (std::size_t j = 0; j < n; ++j) {
        if (a.p(i, j) < 0.0 || a.p(i, j) != a.p(j, i)) return {false, tag + "not symmetric"};
        total += a.p(i, j);
      }
      const double h = testing::log2_perplexity(testing::conditional_row(d, i, a.sigma[i]));
      const double err = std::abs(h - std::log2(perplexity));
      worst = std::max(worst, err);
      if (err > 1e-5) return {false, tag + "row " + std::to_string(i) + " log2 error " + std::to_string(err)};
    }
    if (std::abs(total - 1.0) > 1e-12) return {false, tag + "sum " + std::to_string(total)};
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "50 instances, worst log2 error %.6e", worst);
  return {true, buf};
}

Outcome kl_self() {
  std::mt19937_64 rng(109);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Matrix x = testing::random_matrix(rng, 30, 5);
    const Matrix p = tsne::calibrate_affinities(tsne::pairwise_squared_distances(x), 8.0).p;
    worst = std::max(worst, std::abs(tsne::kl_divergence(p, p)));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max |KL(P||P)| = %.2e (limit 1e-12)", worst);
  return {worst <= 1e-12, buf};
}

Outcome cluster_separation() {
  const auto c = testing::gaussian_clusters(113, 50, 300, 10.0);
  const auto r = tsne::run_tsne(c.x, tsne::Config{});
  const double fraction = testing::same_label_nn_fraction(r.coords, c.labels);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "same-cluster 1-NN %.3f (min 0.90), KL %.4f -> %.4f", fraction,
                r.initial_kl, r.final_kl);
  return {fraction >= 0.9 && r.final_kl < r.initial_kl, buf};
}

Outcome analogy_oracle() {
  const auto royalty = embed::load_model(fixture("royalty.bin"), embed::ModelFormat::kBinary);
  const std::vector<std::string> pos{"king", "woman"};
  const std::vector<std::string> neg{"man"};
  const auto top = embed::analogy(royalty, pos, neg, 1);
  if (top.empty() || top[0].word != "queen") return {false, "king - man + woman is not queen"};

  std::mt19937_64 rng(127);
  for (int i = 0; i < 10; ++i) {
    const auto model = testing::random_model(rng, 50 + 15 * i, 5 + 4 * i);
    const auto& words = model.words();
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::vector<std::string> p{words[pick(rng)]};
    std::vector<std::string> n;
    for (const auto* w : {&words[pick(rng)], &words[pick(rng)]}) {
      if (*w != p[0] && (n.empty() || *w != n[0])) n.push_back(*w);
    }
    if (n.size() == 2) {
      p.push_back(n.back());
      n.pop_back();
    }
    const auto got = embed::analogy(model, p, n, 10);
    if (!testing::same_hits(got, testing::brute_force_analogy(model, p, n, 10), 1e-6)) {
      return {false, "random model " + std::to_string(i) + " disagrees with brute force"};
    }
  }
  return {true, "queen, and 10 random models match brute force within 1e-6"};
}

Outcome diff_partition() {
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 100; ++trial) {
    text::TokenCounts a;
    text::TokenCounts b;
    std::set<std::string> sa;
    std::set<std::string> sb;
    std::bernoulli_distribution in_a(0.5);
    std::bernoulli_distribution in_b(0.5);
    for (int i = 0; i < 80; ++i) {
      const std::string w = testing::random_word(rng, std::size_t(i));
      if (in_a(rng)) {
        a.counts[w] = 1 + std::size_t(i);
        sa.insert(w);
      }
      if (in_b(rng)) {
        b.counts[w] = 2 + std::size_t(i);
        sb.insert(w);
      }
    }
    const auto d = diff::diff(a, b);
    std::set<std::string> only_a;
    std::set<std::string> only_b;
    std::set<std::string> both;
    std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(only_a, only_a.end()));
    std::set_difference(sb.begin(), sb.end(), sa.begin(), sa.end(), std::inserter(only_b, only_b.end()));
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(both, both.end()));
    const auto keys = [](const auto& m) {
      std::set<std::string> s;
      for (const auto& [w, c] : m) s.insert(w);
      return s;
    };
    if (keys(d.only_a) != only_a || keys(d.only_b) != only_b || keys(d.both) != both) {
      return {false, "trial " + std::to_string(trial) + " partition differs from set algebra"};
    }
    for (const auto& w : both) {
      if (d.both.at(w).a != a.counts.at(w) || d.both.at(w).b != b.counts.at(w)) {
        return {false, "trial " + std::to_string(trial) + " counts differ"};
      }
    }
  }
  return {true, "100 vocabulary pairs"};
}

Outcome end_to_end_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("wordmap_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  pipeline::Options o;
  o.source_a = fixture("source_a.txt");
  o.source_b = fixture("source_b.txt");
  o.model_path = fixture("fixture_model.bin");
  o.generated_at = "2015-05-26T00:00:00Z";
  o.verbosity = 0;
  std::ostringstream log;
  o.output_path = (dir / "first.json").string();
  pipeline::run_compare(o, log);
  o.output_path = (dir / "second.json").string();
  pipeline::run_compare(o, log);
  const std::string first = pipeline::read_file((dir / "first.json").string());
  const std::string second = pipeline::read_file((dir / "second.json").string());
  fs::remove_all(dir);
  if (first != second) return {false, "outputs differ"};
  const auto map = mapfile::parse_map(first);
  return {true, std::to_string(map.points.size()) + " points, " + std::to_string(first.size()) +
                    " identical bytes, schema valid"};
}

Outcome stoplist() {
  const auto& stop = text::default_stoplist();
  if (stop.size() != 3000) return {false, std::to_string(stop.size()) + " entries"};
  std::string doc;
  std::size_t i = 0;
  for (const auto& w : stop.words()) {
    std::string variant = w;
    if (i % 3 == 1) variant[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(variant[0])));
    if (i % 3 == 2) variant = text::to_lower(variant) + ",";
    doc += variant + (i % 7 == 0 ? " direwolf " : " ");
    ++i;
  }
  const auto counts = text::count_and_filter(text::tokenize(doc), stop, true);
  for (const auto& [w, n] : counts.counts) {
    if (stop.contains(w)) return {false, "'" + w + "' survived filtering"};
  }
  if (counts.counts.size() != 1 || !counts.counts.count("direwolf")) {
    return {false, "unexpected survivors"};
  }
  return {true, "3000 entries, no member survives filtering"};
}

}  // namespace

int main() {
  criterion("model-roundtrip", 1.0, model_roundtrip);
  criterion("gradient-check", 30.0, gradient_check);
  criterion("affinity-calibration", 30.0, affinity_calibration);
  criterion("kl-self", 5.0, kl_self);
  criterion("cluster-separation", 60.0, cluster_separation);
  criterion("analogy-oracle", 5.0, analogy_oracle);
  criterion("diff-partition", 5.0, diff_partition);
  criterion("end-to-end-determinism", 10.0, end_to_end_determinism);
  criterion("stoplist", 5.0, stoplist);
  std::printf("%s: %d failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
