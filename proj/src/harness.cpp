#include "cootmv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cootmv/errors.hpp"
#include "cootmv/text_io.hpp"
#include "json.hpp"

namespace cootmv::harness {

using text_io::format_double;

coot::SearchSpace default_space() { return {{0.0, 0.0, 51.0, 151.0}, {1.0, 50.0, 150.0, 255.0}}; }

void RunConfig::validate() const {
  coot.validate();
  space.validate();
  if (space.dims() != 4) throw ConfigError("search space must have 4 dimensions (delta, k_h1, k_h2, k_h3)");
  if (space.lower[0] < 0.0 || space.upper[0] > 1.0) throw ConfigError("delta bounds must lie within [0,1]");
  if (space.lower[1] < 0.0 || space.upper[3] > 255.0) throw ConfigError("threshold bounds must lie within [0,255]");
  // Rounded thresholds from disjoint boxes keep k_h1 < k_h2 < k_h3.
  if (!(std::floor(space.upper[1] + 0.5) < std::floor(space.lower[2] + 0.5) &&
        std::floor(space.upper[2] + 0.5) < std::floor(space.lower[3] + 0.5)))
    throw ConfigError("threshold boxes overlap after rounding; ordering k_h1 < k_h2 < k_h3 not guaranteed");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

namespace {

using nlohmann::json;

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

void apply_run_config_json(RunConfig& config, const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  for (const auto& [key, value] : root.items()) {
    if (key == "coot") {
      if (!value.is_object()) throw ConfigError("config key 'coot' must be an object");
      for (const auto& [ck, cv] : value.items()) {
        if (ck == "population") config.coot.population = get_as<int>(cv, "coot.population");
        else if (ck == "max_iters") config.coot.max_iters = get_as<int>(cv, "coot.max_iters");
        else if (ck == "leader_fraction") config.coot.leader_fraction = get_as<double>(cv, "coot.leader_fraction");
        else if (ck == "probability_p") config.coot.probability_p = get_as<double>(cv, "coot.probability_p");
        else if (ck == "seed") config.coot.seed = get_as<std::uint64_t>(cv, "coot.seed");
        else throw ConfigError("unknown config key 'coot." + ck + "'");
      }
    } else if (key == "space") {
      if (!value.is_object()) throw ConfigError("config key 'space' must be an object");
      for (const auto& [sk, sv] : value.items()) {
        if (sk == "lower") config.space.lower = get_as<std::vector<double>>(sv, "space.lower");
        else if (sk == "upper") config.space.upper = get_as<std::vector<double>>(sv, "space.upper");
        else throw ConfigError("unknown config key 'space." + sk + "'");
      }
    } else if (key == "fitness_mode") {
      config.fitness_mode = parse_fitness_mode(get_as<std::string>(value, "fitness_mode"));
    } else if (key == "svr_model") {
      config.svr_model = resolve(base_dir, get_as<std::string>(value, "svr_model"));
    } else if (key == "niqe_model") {
      config.niqe_model = resolve(base_dir, get_as<std::string>(value, "niqe_model"));
    } else if (key == "trace") {
      config.trace_path = get_as<std::string>(value, "trace");
    } else if (key == "report") {
      config.report_path = get_as<std::string>(value, "report");
    } else if (key == "threads") {
      config.threads = get_as<int>(value, "threads");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig config;
  apply_run_config_json(config, buf.str(), path.parent_path());
  return config;
}

QualityFitness load_fitness(const RunConfig& config) {
  try {
    if (config.niqe_model.empty()) throw ConfigError("a NIQE model is required (--niqe-model)");
    niqe::NiqeModel niqe = niqe::load_niqe_model(config.niqe_model);
    std::optional<brisque::SvrModel> svr;
    if (config.fitness_mode == FitnessMode::kBrisqueNiqe) {
      if (config.svr_model.empty()) throw ConfigError("brisque-niqe fitness needs an SVR model (--svr-model)");
      svr = brisque::load_svr_model(config.svr_model);
    }
    return QualityFitness(std::move(niqe), std::move(svr));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model load failed: ") + e.what());
  }
}

EnhancementParams params_from_position(std::span<const double> position) {
  if (position.size() != 4) throw ParameterError("parameter vector must have 4 entries");
  EnhancementParams params;
  params.delta = std::clamp(position[0], 0.0, 1.0);
  params.partition = partition_from_reals(position[1], position[2], position[3]);
  return params;
}

EnhanceResult enhance_one(const GrayImage& img, const RunConfig& config, const QualityFitness& scorer) {
  config.validate();
  coot::CootConfig coot_config = config.coot;
  coot_config.accept_positive_infinity = true;

  auto objective = [&](std::span<const double> position) {
    const GrayImage candidate = mvsihe_enhance(img, params_from_position(position));
    try {
      return scorer(candidate);
    } catch (const MetricError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  EnhanceResult result;
  result.run = coot::run(objective, config.space, coot_config);
  if (!std::isfinite(result.run.best_fitness))
    throw EnhancementError("quality metrics failed for every candidate enhancement");
  result.params = params_from_position(result.run.best_position);
  result.enhanced = mvsihe_enhance(img, result.params);
  return result;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kHe: return "HE";
    case Method::kBbhe: return "BBHE";
    case Method::kDsihe: return "DSIHE";
    case Method::kMvsihe: return "MVSIHE(0.6)";
    case Method::kCoa: return "COA-MVSIHE";
  }
  return "?";
}

std::set<Method> parse_methods(const std::string& comma_list) {
  static const std::map<std::string, Method> names{{"he", Method::kHe},         {"bbhe", Method::kBbhe},
                                                   {"dsihe", Method::kDsihe},   {"mvsihe", Method::kMvsihe},
                                                   {"coa", Method::kCoa}};
  std::set<Method> out;
  std::stringstream ss(comma_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    std::transform(item.begin(), item.end(), item.begin(), [](unsigned char c) { return std::tolower(c); });
    if (item.empty()) continue;
    auto it = names.find(item);
    if (it == names.end()) throw ConfigError("unknown method '" + item + "' (he, bbhe, dsihe, mvsihe, coa)");
    out.insert(it->second);
  }
  if (out.empty()) throw ConfigError("no methods selected");
  return out;
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".pgm") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string class_label(const std::filesystem::path& dataset_dir, const std::filesystem::path& image) {
  const auto rel = std::filesystem::relative(image, dataset_dir);
  return rel.has_parent_path() ? rel.parent_path().filename().string() : "unlabeled";
}

namespace {

struct ImageOutcome {
  std::vector<BatchRow> rows;
  std::vector<std::string> skipped;
};

ImageOutcome process_image(const std::filesystem::path& dataset_dir, const std::filesystem::path& path,
                           const std::set<Method>& methods, const RunConfig& config, const QualityFitness* scorer) {
  ImageOutcome outcome;
  const std::string rel = std::filesystem::relative(path, dataset_dir).generic_string();
  GrayImage img;
  try {
    img = load_image(path);
  } catch (const Error& e) {
    outcome.skipped.push_back(rel + ": " + e.what());
    return outcome;
  }
  for (Method m : methods) {
    try {
      BatchRow row;
      row.path = rel;
      row.label = class_label(dataset_dir, path);
      row.method = m;
      GrayImage out;
      switch (m) {
        case Method::kHe: out = classic_he(img); break;
        case Method::kBbhe: out = bbhe(img); break;
        case Method::kDsihe: out = dsihe(img); break;
        case Method::kMvsihe: {
          const Partition p = mvsihe_partition(compute_histogram(img));
          out = mvsihe_enhance(img, {kBaselineDelta, p});
          row.delta = kBaselineDelta;
          row.partition = p;
          if (scorer) {
            try {
              row.fitness = (*scorer)(out);
            } catch (const MetricError&) {
            }
          }
          break;
        }
        case Method::kCoa: {
          EnhanceResult r = enhance_one(img, config, *scorer);
          out = std::move(r.enhanced);
          row.delta = r.params.delta;
          row.partition = r.params.partition;
          row.fitness = r.run.best_fitness;
          break;
        }
      }
      row.metrics = evaluate_pair(img, out);
      outcome.rows.push_back(std::move(row));
    } catch (const Error& e) {
      outcome.skipped.push_back(rel + " [" + to_string(m) + "]: " + e.what());
    }
  }
  return outcome;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

std::vector<MethodSummary> summarize(const std::vector<BatchRow>& rows) {
  std::map<Method, std::vector<const BatchRow*>> by_method;
  for (const auto& r : rows) by_method[r.method].push_back(&r);
  std::vector<MethodSummary> out;
  for (const auto& [method, group] : by_method) {
    MethodSummary s;
    s.method = method;
    s.rows = group.size();
    std::vector<double> ambe, psnr, ssi;
    for (const BatchRow* r : group) {
      ambe.push_back(r->metrics.ambe);
      ssi.push_back(r->metrics.ssi);
      if (std::isfinite(r->metrics.psnr)) psnr.push_back(r->metrics.psnr);
      else ++s.psnr_excluded;
    }
    s.ambe = mean_of(ambe);
    s.psnr = psnr.empty() ? std::numeric_limits<double>::infinity() : mean_of(psnr);
    s.ssi = mean_of(ssi);
    out.push_back(s);
  }
  return out;
}

BatchReport batch_evaluate(const std::filesystem::path& dataset_dir, const std::set<Method>& methods,
                           const RunConfig& config, const QualityFitness* scorer, std::ostream* log) {
  if (methods.count(Method::kCoa)) {
    config.validate();
    if (!scorer) throw ConfigError("COA-MVSIHE needs quality models");
  }
  const auto images = list_images(dataset_dir);
  std::vector<ImageOutcome> outcomes(images.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < images.size(); i = next++)
      outcomes[i] = process_image(dataset_dir, images[i], methods, config, scorer);
  };
  const int n_threads = std::max(1, std::min<int>(config.threads, static_cast<int>(images.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  BatchReport report;
  for (auto& o : outcomes) {
    for (auto& r : o.rows) report.rows.push_back(std::move(r));
    for (auto& s : o.skipped) {
      if (log) *log << "skipped " << s << "\n";
      report.skipped.push_back(std::move(s));
    }
  }
  report.summaries = summarize(report.rows);
  return report;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_batch_rows(const BatchReport& report, std::ostream& out) {
  out << "path,class,method,ambe,psnr,ssi,delta,k_h1,k_h2,k_h3,fitness\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.path) << "," << csv_field(r.label) << "," << to_string(r.method) << ","
        << format_double(r.metrics.ambe) << "," << format_double(r.metrics.psnr) << ","
        << format_double(r.metrics.ssi) << ",";
    out << (r.delta ? format_double(*r.delta) : "") << ",";
    if (r.partition) out << r.partition->k_h1 << "," << r.partition->k_h2 << "," << r.partition->k_h3 << ",";
    else out << ",,,";
    out << (r.fitness ? format_double(*r.fitness) : "") << "\n";
  }
}

void write_batch_summary(const BatchReport& report, std::ostream& out) {
  out << "method,rows,ambe,psnr,psnr_excluded,ssi\n";
  for (const auto& s : report.summaries) {
    out << to_string(s.method) << "," << s.rows << "," << format_double(s.ambe) << "," << format_double(s.psnr)
        << "," << s.psnr_excluded << "," << format_double(s.ssi) << "\n";
  }
}

MetricStats metric_stats(const std::vector<double>& values) {
  MetricStats s;
  std::vector<double> finite;
  for (double v : values) {
    if (std::isfinite(v)) finite.push_back(v);
    else ++s.excluded;
  }
  s.samples = finite.size();
  if (finite.empty()) return s;
  s.mean = mean_of(finite);
  if (finite.size() > 1) {
    double ss = 0;
    for (double v : finite) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(finite.size() - 1);
  }
  s.stddev = std::sqrt(s.variance);
  const auto [lo, hi] = std::minmax_element(finite.begin(), finite.end());
  s.range = *hi - *lo;
  return s;
}

StabilityReport stability_run(const std::vector<std::filesystem::path>& images, int runs, const RunConfig& config,
                              const QualityFitness& scorer, bool vary_seed, std::ostream* log) {
  if (runs < 2) throw ConfigError("stability needs at least 2 runs");
  config.validate();
  StabilityReport report;
  for (const auto& path : images) {
    GrayImage img;
    try {
      img = load_image(path);
    } catch (const Error& e) {
      report.failed_cells += static_cast<std::size_t>(runs);
      if (log) *log << "skipped " << path.string() << ": " << e.what() << "\n";
      continue;
    }
    for (int r = 0; r < runs; ++r) {
      RunConfig cell_config = config;
      cell_config.coot.seed = config.coot.seed + (vary_seed ? static_cast<std::uint64_t>(r) : 0);
      try {
        const EnhanceResult res = enhance_one(img, cell_config, scorer);
        report.cells.push_back(
            {path.string(), r, cell_config.coot.seed, evaluate_pair(img, res.enhanced), res.run.best_fitness});
      } catch (const Error& e) {
        ++report.failed_cells;
        if (log) *log << "run " << r << " on " << path.string() << " failed: " << e.what() << "\n";
      }
    }
  }
  if (report.cells.size() < 2)
    throw StabilityError("stability needs at least 2 successful runs, got " + std::to_string(report.cells.size()));
  std::vector<double> ambe, psnr, ssi;
  for (const auto& c : report.cells) {
    ambe.push_back(c.metrics.ambe);
    psnr.push_back(c.metrics.psnr);
    ssi.push_back(c.metrics.ssi);
  }
  report.ambe = metric_stats(ambe);
  report.psnr = metric_stats(psnr);
  report.ssi = metric_stats(ssi);
  return report;
}

void write_stability_report(const StabilityReport& report, std::ostream& out) {
  const std::array<const MetricStats*, 3> cols{&report.ambe, &report.psnr, &report.ssi};
  auto line = [&](const char* name, auto field) {
    out << name;
    for (const MetricStats* s : cols) out << "," << field(*s);
    out << "\n";
  };
  out << "measurement,ambe,psnr,ssi\n";
  line("variance", [](const MetricStats& s) { return format_double(s.variance); });
  line("stddev", [](const MetricStats& s) { return format_double(s.stddev); });
  line("range", [](const MetricStats& s) { return format_double(s.range); });
  line("mean", [](const MetricStats& s) { return format_double(s.mean); });
  line("samples", [](const MetricStats& s) { return std::to_string(s.samples); });
  line("excluded", [](const MetricStats& s) { return std::to_string(s.excluded); });
}

void write_trace(const coot::ConvergenceTrace& trace, std::ostream& out) {
  out << "iteration,best_fitness\n";
  for (std::size_t i = 0; i < trace.best_per_iteration.size(); ++i)
    out << (i + 1) << "," << format_double(trace.best_per_iteration[i]) << "\n";
}

void export_trace(const coot::ConvergenceTrace& trace, const std::filesystem::path& path) {
  if (trace.best_per_iteration.empty()) throw ParameterError("cannot export an empty trace");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_trace(trace, out);
  if (!out) throw IoError("write failed: " + path.string());
}

niqe::NiqeModel train_niqe(const std::filesystem::path& corpus_dir, int patch_size, double threshold,
                           const std::filesystem::path& out_path, std::ostream* log) {
  std::vector<nss::FeatureVector> pooled;
  std::size_t used = 0;
  for (const auto& path : list_images(corpus_dir)) {
    try {
      const GrayImage img = load_image(path);
      const auto features = niqe::niqe_patch_features(img, patch_size, threshold);
      pooled.insert(pooled.end(), features.begin(), features.end());
      ++used;
    } catch (const Error& e) {
      if (log) *log << "skipped " << path.string() << ": " << e.what() << "\n";
    }
  }
  niqe::NiqeModel model = niqe::fit_mvg(pooled, patch_size, threshold);
  if (log) {
    *log << "trained on " << pooled.size() << " patches from " << used << " images\n";
    if (model.degenerate()) *log << "warning: covariance is zero (degenerate corpus)\n";
  }
  if (!out_path.empty()) niqe::save_niqe_model(model, out_path);
  return model;
}

}  // namespace cootmv::harness
