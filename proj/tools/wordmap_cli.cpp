// wordmap: build 2D word maps comparing two texts, and query word vectors.

#include <cstdio>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "wordmap/embedding_store.hpp"
#include "wordmap/map_export.hpp"
#include "wordmap/pipeline.hpp"

namespace {

using namespace wordmap;
using pipeline::ExitCode;

const std::map<std::string, embed::ModelFormat> kFormats{
    {"binary", embed::ModelFormat::kBinary},
    {"text", embed::ModelFormat::kText},
};

void add_model_options(CLI::App& cmd, std::string& path, embed::ModelFormat& format) {
  cmd.add_option("-m,--model", path, "word2vec model file")->required();
  cmd.add_option("--model-format", format, "model file layout")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case))
      ->option_text("binary|text [binary]");
}

struct Verbosity {
  int verbose = 0;
  bool quiet = false;

  int level() const { return quiet ? 0 : 1 + verbose; }
};

void add_pipeline_options(CLI::App& cmd, pipeline::Options& o, Verbosity& v) {
  add_model_options(cmd, o.model_path, o.model_format);
  cmd.add_option("-o,--output", o.output_path, "map file to write")->required();
  cmd.add_option("--stoplist", o.stoplist_path,
                 "newline-delimited list of words to ignore (default: bundled 3000-word list)")
      ->check(CLI::ExistingFile);
  cmd.add_option("--kl-history", o.kl_history_path, "write the KL trace as CSV (iteration,kl)");
  cmd.add_option("--generated-at", o.generated_at,
                 "timestamp stored in the map (YYYY-MM-DDTHH:MM:SSZ; default: now)");
  cmd.add_flag_callback("--keep-non-alpha", [&o] { o.drop_non_alpha = false; },
                        "keep tokens without letters (numbers, punctuation)");

  auto& t = o.tsne;
  cmd.add_option("--perplexity", t.perplexity, "target perplexity")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--learning-rate", t.learning_rate, "gradient descent step size")->capture_default_str();
  cmd.add_option("--iterations", t.n_iter, "number of gradient descent iterations")->capture_default_str();
  cmd.add_option("--exaggeration", t.early_exaggeration_factor, "early exaggeration factor")->capture_default_str();
  cmd.add_option("--exaggeration-iters", t.early_exaggeration_iters, "iterations with exaggerated affinities")
      ->capture_default_str();
  cmd.add_option("--momentum-initial", t.momentum_initial)->capture_default_str();
  cmd.add_option("--momentum-final", t.momentum_final)->capture_default_str();
  cmd.add_option("--momentum-switch", t.momentum_switch_iter, "iteration at which momentum switches")
      ->capture_default_str();
  cmd.add_option("--seed", t.seed, "seed for the initial layout")->capture_default_str();
  cmd.add_option("--kl-interval", t.kl_interval, "record KL every N iterations")->capture_default_str();
  cmd.add_flag_callback("--no-gains", [&t] { t.adaptive_gains = false; },
                        "disable adaptive per-coordinate step sizes");
  cmd.add_option("-j,--threads", t.num_threads, "worker threads (does not change the result)")
      ->capture_default_str();
  cmd.add_flag("-v,--verbose", v.verbose, "more progress output (repeatable)");
  cmd.add_flag("-q,--quiet", v.quiet, "only print warnings and errors");
}

int report(const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  return pipeline::exit_code_for(e);
}

void print_hits(const std::vector<embed::SimilarityHit>& hits) {
  for (const auto& h : hits) std::printf("%s\t%.6f\n", h.word.c_str(), h.score);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build word maps comparing two texts with word vectors and t-SNE"};
  app.require_subcommand(1);

  pipeline::Options opts;
  opts.tsne.num_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto* compare = app.add_subcommand("compare", "map the vocabularies of two texts");
  compare->add_option("source_a", opts.source_a, "first text (UTF-8)")->required();
  compare->add_option("source_b", opts.source_b, "second text (UTF-8)")->required();
  compare->add_option("--name-a", opts.name_a, "label for source A (default: file name)");
  compare->add_option("--name-b", opts.name_b, "label for source B (default: file name)");
  Verbosity compare_verbosity;
  add_pipeline_options(*compare, opts, compare_verbosity);

  pipeline::Options single_opts = opts;
  auto* single = app.add_subcommand("single", "map the vocabulary of one text");
  single->add_option("source", single_opts.source_a, "text (UTF-8)")->required();
  single->add_option("--name", single_opts.name_a, "label for the source (default: file name)");
  Verbosity single_verbosity;
  add_pipeline_options(*single, single_opts, single_verbosity);

  std::string query_model;
  embed::ModelFormat query_format = embed::ModelFormat::kBinary;
  std::vector<std::string> positive;
  std::vector<std::string> negative;
  std::size_t k = 10;
  auto* analogy = app.add_subcommand("analogy", "3CosAdd analogy query, e.g. -p king -p woman -n man");
  add_model_options(*analogy, query_model, query_format);
  analogy->add_option("-p,--positive", positive, "words added to the query")->required();
  analogy->add_option("-n,--negative", negative, "words subtracted from the query");
  analogy->add_option("-k", k, "number of results")->capture_default_str()->check(CLI::PositiveNumber);

  std::string nearest_word;
  auto* nearest = app.add_subcommand("nearest", "words closest to a word by cosine similarity");
  add_model_options(*nearest, query_model, query_format);
  nearest->add_option("word", nearest_word)->required();
  nearest->add_option("-k", k, "number of results")->capture_default_str()->check(CLI::PositiveNumber);

  std::string map_path;
  auto* validate = app.add_subcommand("validate-map", "check a map file against the schema");
  validate->add_option("map", map_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (compare->parsed()) {
      opts.verbosity = compare_verbosity.level();
      pipeline::run_compare(opts, std::cerr);
    } else if (single->parsed()) {
      single_opts.verbosity = single_verbosity.level();
      pipeline::run_single(single_opts, std::cerr);
    } else if (analogy->parsed()) {
      const auto model = embed::load_model(query_model, query_format);
      print_hits(embed::analogy(model, positive, negative, k));
    } else if (nearest->parsed()) {
      const auto model = embed::load_model(query_model, query_format);
      print_hits(embed::nearest(model, nearest_word, k));
    } else if (validate->parsed()) {
      const auto map = mapfile::parse_map(pipeline::read_file(map_path));
      const auto counts = mapfile::label_counts(map);
      std::printf("valid: %zu points (a: %zu, b: %zu, both: %zu)\n", map.points.size(), counts[0],
                  counts[1], counts[2]);
    }
  } catch (const std::exception& e) {
    return report(e);
  }
  return pipeline::kOk;
}
