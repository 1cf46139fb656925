#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wordmap/embedding_store.hpp"
#include "wordmap/error.hpp"
#include "wordmap/tsne.hpp"

namespace wordmap::pipeline {

/// Process exit codes used by the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIoError = 2,
  kInvalidInput = 3,
  kConfigError = 4,
  kRuntimeError = 5,
  kMissingWord = 6,
};

/// Exit code for an exception escaping a pipeline stage.
ExitCode exit_code_for(const std::exception& e);

/// An error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::exception& cause)
      : Error(stage + ": " + cause.what()), stage_(std::move(stage)), code_(exit_code_for(cause)) {}

  const std::string& stage() const noexcept { return stage_; }
  ExitCode code() const noexcept { return code_; }

 private:
  std::string stage_;
  ExitCode code_;
};

struct Options {
  std::string source_a;
  /// Empty for single-source maps.
  std::string source_b;
  /// Display names written to the map; default to the file names.
  std::string name_a;
  std::string name_b;
  std::string model_path;
  embed::ModelFormat model_format = embed::ModelFormat::kBinary;
  /// Bundled list when unset.
  std::optional<std::string> stoplist_path;
  std::string output_path;
  std::optional<std::string> kl_history_path;
  bool drop_non_alpha = true;
  tsne::Config tsne;
  /// Fixed "generated_at" value; the current time when unset.
  std::optional<std::string> generated_at;
  /// 0 quiet, 1 summary, 2 progress.
  int verbosity = 1;
};

struct Summary {
  std::size_t tokens_a = 0;
  std::size_t tokens_b = 0;
  std::size_t vocab_a = 0;
  std::size_t vocab_b = 0;
  std::size_t only_a = 0;
  std::size_t only_b = 0;
  std::size_t both = 0;
  std::size_t dropped = 0;
  std::size_t points = 0;
  double perplexity = 0.0;
  std::optional<double> final_kl;
  std::vector<std::string> warnings;
};

/// Perplexity actually used for `n_points` words: `requested`, or
/// max((n - 1) / 3, 1.5) when 3 * requested > n - 1.
double effective_perplexity(double requested, std::size_t n_points);

/// Two-source map: tokenize, filter, diff, restrict to the model, embed,
/// project and write `options.output_path` atomically. Progress and the
/// summary go to `log`. Throws StageError; no output file is left behind on
/// failure.
Summary run_compare(const Options& options, std::ostream& log);

/// One-source map; every point is labelled "a".
Summary run_single(const Options& options, std::ostream& log);

/// Writes `contents` to a temporary file next to `path` and renames it
/// into place.
void write_file_atomic(const std::string& path, std::string_view contents);

std::string read_file(const std::string& path);

}  // namespace wordmap::pipeline
