#include "wordmap/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "wordmap/corpus_diff.hpp"
#include "wordmap/map_export.hpp"
#include "wordmap/tokenizer.hpp"

namespace wordmap::pipeline {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e);
  }
}

std::string display_name(const std::string& explicit_name, const std::string& path) {
  if (!explicit_name.empty()) return explicit_name;
  return fs::path(path).filename().string();
}

text::TokenCounts count_source(const std::string& path, const text::Stoplist& stoplist,
                               bool drop_non_alpha, const std::string& label) {
  const std::string content = stage("read " + label, [&] { return read_file(path); });
  return stage("tokenize " + label, [&] {
    return text::count_and_filter(text::tokenize(content), stoplist, drop_non_alpha);
  });
}

Summary build_and_write(const Options& options, const diff::DiffResult& diffed, Summary summary,
                        std::ostream& log) {
  if (options.generated_at && !mapfile::is_valid_timestamp(*options.generated_at)) {
    throw StageError("configure", ConfigError("generated-at must look like YYYY-MM-DDTHH:MM:SSZ"));
  }
  const auto model = stage("load model", [&] {
    return embed::load_model(options.model_path, options.model_format);
  });
  if (options.verbosity >= 2) {
    log << "model: " << model.vocab_size() << " words, dimension " << model.dim() << '\n';
  }

  auto restricted = diff::restrict_to_model(diffed, model);
  const diff::DiffResult& kept = restricted.kept;
  summary.only_a = kept.only_a.size();
  summary.only_b = kept.only_b.size();
  summary.both = kept.both.size();
  summary.dropped = restricted.dropped.size();

  const std::vector<std::string> words = kept.words();
  const std::size_t n = words.size();
  summary.points = n;

  Matrix coords;
  std::vector<tsne::KlSample> kl_history;
  tsne::Config config = options.tsne;
  if (n == 0) {
    summary.warnings.emplace_back("no words left after filtering and model lookup; writing an empty map");
  } else {
    if (n < 4) {
      throw StageError("project", ConfigError("only " + std::to_string(n) +
                                              " words can be placed; t-SNE needs at least 4"));
    }
    const double perplexity = effective_perplexity(config.perplexity, n);
    if (perplexity != config.perplexity) {
      std::ostringstream msg;
      msg << "perplexity " << config.perplexity << " is too large for " << n
          << " words; using " << perplexity;
      summary.warnings.push_back(msg.str());
      config.perplexity = perplexity;
    }

    Matrix x(n, model.dim());
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = *model.lookup(words[i]);
      std::copy(v.begin(), v.end(), x.row(i).begin());
    }
    if (options.verbosity >= 2) log << "running t-SNE on " << n << " words\n";
    auto result = stage("project", [&] { return tsne::run_tsne(x, config); });
    if (result.unconverged_points > 0) {
      summary.warnings.push_back(std::to_string(result.unconverged_points) +
                                 " points did not reach the target perplexity");
    }
    summary.final_kl = result.final_kl;
    coords = std::move(result.coords);
    kl_history = std::move(result.kl_history);
  }
  summary.perplexity = config.perplexity;

  const std::string document = stage("export", [&] {
    mapfile::MapMeta meta;
    meta.source_a_name = display_name(options.name_a, options.source_a);
    meta.source_b_name =
        options.source_b.empty() ? options.name_b : display_name(options.name_b, options.source_b);
    meta.dim = model.dim();
    meta.perplexity = config.perplexity;
    meta.generated_at = options.generated_at.value_or(mapfile::utc_timestamp_now());
    const auto map = mapfile::build_map(kept, coords, words, std::move(meta));
    std::string bytes = mapfile::serialize_map(map);
    mapfile::parse_map(bytes);
    return bytes;
  });

  stage("write output", [&] { write_file_atomic(options.output_path, document); });
  if (options.kl_history_path) {
    stage("write KL history", [&] {
      std::string csv = "iteration,kl\n";
      char line[64];
      for (const auto& s : kl_history) {
        std::snprintf(line, sizeof(line), "%d,%.17g\n", s.iteration, s.kl);
        csv += line;
      }
      write_file_atomic(*options.kl_history_path, csv);
    });
  }

  for (const auto& w : summary.warnings) log << "warning: " << w << '\n';
  if (options.verbosity >= 1) {
    log << "tokens read: A=" << summary.tokens_a;
    if (!options.source_b.empty()) log << " B=" << summary.tokens_b;
    log << "\nvocabulary after filtering: A=" << summary.vocab_a;
    if (!options.source_b.empty()) log << " B=" << summary.vocab_b;
    log << "\nsets: only A=" << summary.only_a << " only B=" << summary.only_b
        << " both=" << summary.both << "\ndropped (not in model): " << summary.dropped
        << "\npoints written: " << summary.points << " -> " << options.output_path << '\n';
    if (summary.final_kl) log << "final KL: " << *summary.final_kl << '\n';
  }
  return summary;
}

}  // namespace

ExitCode exit_code_for(const std::exception& e) {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->code();
  if (dynamic_cast<const IoError*>(&e)) return kIoError;
  if (dynamic_cast<const MissingWordError*>(&e)) return kMissingWord;
  if (dynamic_cast<const ConfigError*>(&e)) return kConfigError;
  if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const TruncationError*>(&e) ||
      dynamic_cast<const DuplicateKeyError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e)) {
    return kInvalidInput;
  }
  return kRuntimeError;
}

double effective_perplexity(double requested, std::size_t n_points) {
  const double n = static_cast<double>(n_points);
  if (3.0 * requested <= n - 1.0) return requested;
  return std::max((n - 1.0) / 3.0, 1.5);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return std::move(buffer).str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create '" + temp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw IoError("error writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(temp, ignored);
    throw IoError("cannot move output into place at '" + path + "': " + ec.message());
  }
}

Summary run_compare(const Options& options, std::ostream& log) {
  if (options.source_b.empty()) throw StageError("configure", ConfigError("source B is required"));
  const text::Stoplist stoplist = stage("load stoplist", [&] {
    return options.stoplist_path ? text::load_stoplist_file(*options.stoplist_path)
                                 : text::default_stoplist();
  });
  const auto a = count_source(options.source_a, stoplist, options.drop_non_alpha, "source A");
  const auto b = count_source(options.source_b, stoplist, options.drop_non_alpha, "source B");

  Summary summary;
  summary.tokens_a = a.total_tokens;
  summary.tokens_b = b.total_tokens;
  summary.vocab_a = a.counts.size();
  summary.vocab_b = b.counts.size();
  return build_and_write(options, diff::diff(a, b), std::move(summary), log);
}

Summary run_single(const Options& options, std::ostream& log) {
  const text::Stoplist stoplist = stage("load stoplist", [&] {
    return options.stoplist_path ? text::load_stoplist_file(*options.stoplist_path)
                                 : text::default_stoplist();
  });
  const auto a = count_source(options.source_a, stoplist, options.drop_non_alpha, "source A");

  Summary summary;
  summary.tokens_a = a.total_tokens;
  summary.vocab_a = a.counts.size();
  return build_and_write(options, diff::single(a), std::move(summary), log);
}

}  // namespace wordmap::pipeline
