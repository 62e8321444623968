// cootmv: COA-tuned MVSIHE contrast enhancement and evaluation harness.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cootmv/errors.hpp"
#include "cootmv/harness.hpp"
#include "cootmv/text_io.hpp"

namespace fs = std::filesystem;
using namespace cootmv;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  std::optional<int> pop;
  std::optional<std::string> fitness;
  std::optional<std::string> svr_model;
  std::optional<std::string> niqe_model;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--iters", o.iters, "maximum COA iterations");
  cmd->add_option("--pop", o.pop, "COA population size");
  cmd->add_option("--fitness", o.fitness, "fitness: niqe | brisque-niqe");
  cmd->add_option("--svr-model", o.svr_model, "BRISQUE SVR model file");
  cmd->add_option("--niqe-model", o.niqe_model, "NIQE model file");
}

harness::RunConfig build_config(const CommonOptions& o) {
  harness::RunConfig c;
#ifdef COOTMV_MODEL_DIR
  c.svr_model = fs::path(COOTMV_MODEL_DIR) / "reference_svr.txt";
  c.niqe_model = fs::path(COOTMV_MODEL_DIR) / "reference_niqe.txt";
#endif
  if (!o.config_path.empty()) {
    harness::RunConfig from_file = harness::load_run_config(o.config_path);
    // File values replace defaults; empty model paths keep the bundled ones.
    if (from_file.svr_model.empty()) from_file.svr_model = c.svr_model;
    if (from_file.niqe_model.empty()) from_file.niqe_model = c.niqe_model;
    c = std::move(from_file);
  }
  if (o.seed) c.coot.seed = *o.seed;
  if (o.iters) c.coot.max_iters = *o.iters;
  if (o.pop) c.coot.population = *o.pop;
  if (o.fitness) c.fitness_mode = parse_fitness_mode(*o.fitness);
  if (o.svr_model) c.svr_model = *o.svr_model;
  if (o.niqe_model) c.niqe_model = *o.niqe_model;
  if (o.threads) c.threads = *o.threads;
  c.validate();
  return c;
}

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  writer(out);
  if (!out) throw IoError("write failed: " + path.string());
}

int run_enhance(const std::string& in, const std::string& out, const std::string& trace, const CommonOptions& o) {
  harness::RunConfig config = build_config(o);
  if (!trace.empty()) config.trace_path = trace;
  const QualityFitness scorer = harness::load_fitness(config);
  const GrayImage img = load_image(in);
  const harness::EnhanceResult r = harness::enhance_one(img, config, scorer);
  save_image(r.enhanced, out);
  if (!config.trace_path.empty()) harness::export_trace(r.run.trace, config.trace_path);
  const Partition& p = *r.params.partition;
  std::cout << "delta=" << text_io::format_double(r.params.delta) << " k_h1=" << p.k_h1 << " k_h2=" << p.k_h2
            << " k_h3=" << p.k_h3 << " fitness=" << text_io::format_double(r.run.best_fitness)
            << " mode=" << to_string(scorer.mode()) << "\n";
  return 0;
}

int run_batch(const std::string& dir, const std::string& methods_text, std::string report, std::string summary,
              const CommonOptions& o) {
  harness::RunConfig config = build_config(o);
  if (!report.empty()) config.report_path = report;
  const auto methods = harness::parse_methods(methods_text);
  std::optional<QualityFitness> scorer;
  if (methods.count(harness::Method::kCoa)) scorer = harness::load_fitness(config);
  const auto result = harness::batch_evaluate(dir, methods, config, scorer ? &*scorer : nullptr, &std::cerr);
  if (!config.report_path.empty()) {
    write_file(config.report_path, [&](std::ostream& s) { harness::write_batch_rows(result, s); });
    if (summary.empty()) {
      fs::path p = config.report_path;
      summary = (p.parent_path() / (p.stem().string() + "_summary.csv")).string();
    }
  }
  if (!summary.empty())
    write_file(summary, [&](std::ostream& s) { harness::write_batch_summary(result, s); });
  harness::write_batch_summary(result, std::cout);
  if (!result.skipped.empty()) std::cerr << result.skipped.size() << " item(s) skipped\n";
  return 0;
}

int run_stability(const std::vector<std::string>& images, int runs, const std::string& report,
                  const std::string& cells, bool fixed_seed, const CommonOptions& o) {
  const harness::RunConfig config = build_config(o);
  const QualityFitness scorer = harness::load_fitness(config);
  std::vector<fs::path> paths(images.begin(), images.end());
  const auto result = harness::stability_run(paths, runs, config, scorer, !fixed_seed, &std::cerr);
  if (!report.empty())
    write_file(report, [&](std::ostream& s) { harness::write_stability_report(result, s); });
  if (!cells.empty()) {
    write_file(cells, [&](std::ostream& s) {
      s << "image,run,seed,ambe,psnr,ssi,fitness\n";
      for (const auto& c : result.cells)
        s << c.image << "," << c.run << "," << c.seed << "," << text_io::format_double(c.metrics.ambe) << ","
          << text_io::format_double(c.metrics.psnr) << "," << text_io::format_double(c.metrics.ssi) << ","
          << text_io::format_double(c.fitness) << "\n";
    });
  }
  harness::write_stability_report(result, std::cout);
  return 0;
}

int run_train(const std::string& dir, int patch, double threshold, const std::string& out) {
  const auto model = harness::train_niqe(dir, patch, threshold, out, &std::cerr);
  std::cout << "wrote " << out << " (" << model.training_vectors << " patch vectors)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"COA-tuned MVSIHE contrast enhancement"};
  app.require_subcommand(1);

  CommonOptions enhance_opts;
  std::string enhance_in, enhance_out, trace_out;
  auto* enhance = app.add_subcommand("enhance", "optimize MVSIHE parameters for one image and enhance it");
  enhance->add_option("input", enhance_in, "input image (PNG or PGM)")->required();
  enhance->add_option("output", enhance_out, "output image (.png or .pgm)")->required();
  enhance->add_option("--trace", trace_out, "write convergence trace CSV");
  add_common(enhance, enhance_opts);

  CommonOptions batch_opts;
  std::string batch_dir, methods = "he,bbhe,dsihe,mvsihe,coa", report, summary;
  auto* batch = app.add_subcommand("batch", "evaluate enhancement methods over a directory");
  batch->add_option("dir", batch_dir, "dataset directory (class = subfolder name)")->required();
  batch->add_option("--methods", methods, "comma list of he,bbhe,dsihe,mvsihe,coa");
  batch->add_option("--report", report, "per-image CSV report");
  batch->add_option("--summary", summary, "per-method averages CSV");
  batch->add_option("--threads", batch_opts.threads, "worker threads");
  add_common(batch, batch_opts);

  CommonOptions stab_opts;
  std::vector<std::string> stab_images;
  int runs = 10;
  std::string stab_report, stab_cells;
  bool fixed_seed = false;
  auto* stability = app.add_subcommand("stability", "repeat COA-MVSIHE with derived seeds and report spread");
  stability->add_option("images", stab_images, "input images")->required();
  stability->add_option("--runs", runs, "runs per image");
  stability->add_option("--report", stab_report, "summary CSV");
  stability->add_option("--cells", stab_cells, "per-run CSV");
  stability->add_flag("--fixed-seed", fixed_seed, "reuse the base seed for every run");
  add_common(stability, stab_opts);

  std::string train_dir, train_out = "niqe_model.txt";
  int patch = 96;
  double threshold = 0.75;
  auto* train = app.add_subcommand("train-niqe", "fit a NIQE model to a pristine image corpus");
  train->add_option("dir", train_dir, "corpus directory")->required();
  train->add_option("--patch", patch, "patch size in pixels");
  train->add_option("--threshold", threshold, "sharpness selection threshold");
  train->add_option("--out", train_out, "model output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*enhance) return run_enhance(enhance_in, enhance_out, trace_out, enhance_opts);
    if (*batch) return run_batch(batch_dir, methods, report, summary, batch_opts);
    if (*stability) return run_stability(stab_images, runs, stab_report, stab_cells, fixed_seed, stab_opts);
    if (*train) return run_train(train_dir, patch, threshold, train_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::kConfig: return kExitConfig;
      case ErrorKind::kData: return kExitData;
      case ErrorKind::kInternal: return kExitInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
