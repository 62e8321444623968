#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cootmv/coot.hpp"
#include "cootmv/enhancement.hpp"
#include "cootmv/fitness.hpp"
#include "cootmv/fr_metrics.hpp"
#include "cootmv/image.hpp"

namespace cootmv::harness {

// Search dimensions, in order: delta, k_h1, k_h2, k_h3.
coot::SearchSpace default_space();

struct RunConfig {
  coot::CootConfig coot;
  coot::SearchSpace space = default_space();
  FitnessMode fitness_mode = FitnessMode::kBrisqueNiqe;
  std::filesystem::path svr_model;
  std::filesystem::path niqe_model;
  std::filesystem::path trace_path;
  std::filesystem::path report_path;
  int threads = 1;

  void validate() const;
};

// Keys: coot{population,max_iters,leader_fraction,probability_p,seed},
// space{lower,upper}, fitness_mode, svr_model, niqe_model, trace, report,
// threads. Unknown keys are rejected. Relative model paths resolve against
// the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
void apply_run_config_json(RunConfig& config, const std::string& json_text,
                           const std::filesystem::path& base_dir = {});

// Loads the models named by the config for its fitness mode.
QualityFitness load_fitness(const RunConfig& config);

// Rounds thresholds to integers and checks their ordering.
EnhancementParams params_from_position(std::span<const double> position);

struct EnhanceResult {
  GrayImage enhanced;
  EnhancementParams params;
  coot::RunResult run;
};

EnhanceResult enhance_one(const GrayImage& img, const RunConfig& config, const QualityFitness& scorer);

enum class Method { kHe, kBbhe, kDsihe, kMvsihe, kCoa };

inline constexpr double kBaselineDelta = 0.6;

std::string to_string(Method m);
std::set<Method> parse_methods(const std::string& comma_list);

struct BatchRow {
  std::string path;
  std::string label;
  Method method = Method::kHe;
  MetricReport metrics;
  std::optional<double> delta;
  std::optional<Partition> partition;
  std::optional<double> fitness;
};

struct MethodSummary {
  Method method = Method::kHe;
  std::size_t rows = 0;
  double ambe = 0.0;
  double psnr = 0.0;  // over finite rows only
  std::size_t psnr_excluded = 0;
  double ssi = 0.0;
};

struct BatchReport {
  std::vector<BatchRow> rows;  // ordered by path, then method
  std::vector<MethodSummary> summaries;
  std::vector<std::string> skipped;  // "path: reason"
};

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);
std::string class_label(const std::filesystem::path& dataset_dir, const std::filesystem::path& image);

// `scorer` is required when `methods` contains kCoa; when present it also
// scores the MVSIHE(0.6) baseline so the two fitness values can be compared.
BatchReport batch_evaluate(const std::filesystem::path& dataset_dir, const std::set<Method>& methods,
                           const RunConfig& config, const QualityFitness* scorer, std::ostream* log = nullptr);

std::vector<MethodSummary> summarize(const std::vector<BatchRow>& rows);

void write_batch_rows(const BatchReport& report, std::ostream& out);
void write_batch_summary(const BatchReport& report, std::ostream& out);

struct MetricStats {
  std::size_t samples = 0;
  std::size_t excluded = 0;  // non-finite values (PSNR of an identity output)
  double mean = 0.0;
  double variance = 0.0;  // n - 1 denominator
  double stddev = 0.0;
  double range = 0.0;
};

MetricStats metric_stats(const std::vector<double>& values);

struct StabilityCell {
  std::string image;
  int run = 0;
  std::uint64_t seed = 0;
  MetricReport metrics;
  double fitness = 0.0;
};

struct StabilityReport {
  std::vector<StabilityCell> cells;
  MetricStats ambe;
  MetricStats psnr;
  MetricStats ssi;
  std::size_t failed_cells = 0;
};

// Seeds are base_seed + run_index unless vary_seed is false.
StabilityReport stability_run(const std::vector<std::filesystem::path>& images, int runs, const RunConfig& config,
                              const QualityFitness& scorer, bool vary_seed = true, std::ostream* log = nullptr);

void write_stability_report(const StabilityReport& report, std::ostream& out);

// CSV "iteration,best_fitness", 1-based.
void export_trace(const coot::ConvergenceTrace& trace, const std::filesystem::path& path);
void write_trace(const coot::ConvergenceTrace& trace, std::ostream& out);

niqe::NiqeModel train_niqe(const std::filesystem::path& corpus_dir, int patch_size, double threshold,
                           const std::filesystem::path& out_path, std::ostream* log = nullptr);

}  // namespace cootmv::harness
