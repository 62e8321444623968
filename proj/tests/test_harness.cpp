#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cootmv/errors.hpp"
#include "cootmv/harness.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cootmv;
using namespace cootmv::harness;
using testing::TempDir;

namespace {

GrayImage crop(const GrayImage& img, int x0, int y0, int w, int h) {
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = img.at(x0 + x, y0 + y);
  return out;
}

GrayImage small_photo(int which = 0) {
  static const char* names[] = {"chelsea_0.png", "flower_0.png", "rocket_1.png"};
  return crop(load_image(testing::data_dir() / "corpus" / "test" / names[which]), 40, 40, 96, 96);
}

RunConfig model_config() {
  RunConfig c;
  c.niqe_model = testing::model_dir() / "reference_niqe.txt";
  c.svr_model = testing::model_dir() / "reference_svr.txt";
  return c;
}

const QualityFitness& scorer() {
  static const QualityFitness q = load_fitness(model_config());
  return q;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + COOTMV_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("default search space and validation") {
  const auto s = default_space();
  CHECK(s.lower == std::vector<double>{0, 0, 51, 151});
  CHECK(s.upper == std::vector<double>{1, 50, 150, 255});
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.space.lower.pop_back();
  c.space.upper.pop_back();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.space.upper[1] = 51;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.space.upper[0] = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("JSON run configuration") {
  RunConfig c;
  apply_run_config_json(c, R"({"coot": {"population": 12, "max_iters": 3, "seed": 77},
                               "fitness_mode": "niqe", "niqe_model": "m/n.txt", "threads": 2})",
                        "/base");
  CHECK(c.coot.population == 12);
  CHECK(c.coot.max_iters == 3);
  CHECK(c.coot.seed == 77);
  CHECK(c.fitness_mode == FitnessMode::kNiqeOnly);
  CHECK(c.niqe_model == std::filesystem::path("/base/m/n.txt"));
  CHECK(c.threads == 2);

  CHECK_THROWS_AS(apply_run_config_json(c, R"({"colour": 1})"), ConfigError);
  CHECK_THROWS_AS(apply_run_config_json(c, R"({"coot": {"pop": 1}})"), ConfigError);
  CHECK_THROWS_AS(apply_run_config_json(c, R"({"coot": {"population": "ten"}})"), ConfigError);
  CHECK_THROWS_AS(apply_run_config_json(c, "{not json"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("model loading failures are configuration errors") {
  RunConfig c = model_config();
  c.niqe_model = "/nonexistent/niqe.txt";
  CHECK_THROWS_AS(load_fitness(c), ConfigError);
  c = model_config();
  c.svr_model.clear();
  CHECK_THROWS_AS(load_fitness(c), ConfigError);
  c.fitness_mode = FitnessMode::kNiqeOnly;
  CHECK(load_fitness(c).mode() == FitnessMode::kNiqeOnly);

  TempDir tmp("badmodel");
  std::ofstream(tmp / "bad.txt") << "niqemodel v1\npatch_size 48\n";
  c.niqe_model = tmp / "bad.txt";
  CHECK_THROWS_AS(load_fitness(c), ConfigError);
}

TEST_CASE("positions become ordered partitions") {
  const std::vector<double> pos{0.42, 12.5, 99.4, 151.0};
  const EnhancementParams p = params_from_position(pos);
  CHECK(p.delta == 0.42);
  CHECK(*p.partition == Partition{13, 99, 151});
  CHECK_THROWS_AS(params_from_position(std::vector<double>{0.5, 1, 2}), ParameterError);
}

TEST_CASE("enhance_one") {
  const GrayImage img = small_photo();
  RunConfig c = model_config();
  const EnhanceResult a = enhance_one(img, c, scorer());
  CHECK(a.run.trace.best_per_iteration.size() == 10);
  CHECK(a.run.best_fitness <= a.run.initial_best_fitness);
  CHECK(scorer()(a.enhanced) == a.run.best_fitness);
  CHECK(a.enhanced.same_shape(img));
  const auto& t = a.run.trace.best_per_iteration;
  CHECK(std::is_sorted(t.rbegin(), t.rend()));

  const EnhanceResult b = enhance_one(img, c, scorer());
  CHECK(a.enhanced == b.enhanced);
  CHECK(a.run.trace.best_per_iteration == b.run.trace.best_per_iteration);
}

TEST_CASE("optimized fitness does not lose to the fixed baseline") {
  const GrayImage img = load_image(testing::data_dir() / "corpus" / "test" / "flower_0.png");
  const Partition auto_p = mvsihe_partition(compute_histogram(img));
  const auto space = default_space();
  const std::vector<double> as_pos{0.6, double(auto_p.k_h1), double(auto_p.k_h2), double(auto_p.k_h3)};
  REQUIRE(space.contains(as_pos));
  const double baseline = scorer()(mvsihe_enhance(img, {kBaselineDelta, std::nullopt}));
  CHECK(enhance_one(img, model_config(), scorer()).run.best_fitness <= baseline);
}

TEST_CASE("enhance_one gives up when every candidate fails") {
  // A blank image has no local deviation, so NIQE rejects every candidate.
  CHECK_THROWS_AS(enhance_one(GrayImage(96, 96, 120), model_config(), scorer()), EnhancementError);
}

TEST_CASE("method names") {
  CHECK(parse_methods("he, BBHE,coa") == std::set<Method>{Method::kHe, Method::kBbhe, Method::kCoa});
  CHECK_THROWS_AS(parse_methods("he,clahe"), ConfigError);
  CHECK_THROWS_AS(parse_methods(""), ConfigError);
  CHECK(to_string(Method::kMvsihe) == "MVSIHE(0.6)");
}

TEST_CASE("batch evaluation") {
  TempDir tmp("batch");
  const RunConfig c = model_config();
  CHECK(batch_evaluate(tmp.path(), {Method::kHe}, c, nullptr).rows.empty());

  std::filesystem::create_directories(tmp / "KL1");
  save_image(small_photo(0), tmp / "KL1" / "a.png");
  save_image(small_photo(1), tmp / "b.pgm");
  std::ofstream(tmp / "KL1" / "broken.png") << "garbage";
  std::ofstream(tmp / "notes.txt") << "ignored";

  const BatchReport r = batch_evaluate(tmp.path(), {Method::kHe, Method::kMvsihe}, c, &scorer());
  REQUIRE(r.rows.size() == 4);
  CHECK(r.skipped.size() == 1);
  CHECK(r.rows[0].path == "KL1/a.png");
  CHECK(r.rows[0].label == "KL1");
  CHECK(r.rows[0].method == Method::kHe);
  CHECK(r.rows[1].method == Method::kMvsihe);
  CHECK(r.rows[1].fitness.has_value());
  CHECK(*r.rows[1].delta == 0.6);
  CHECK(r.rows[2].label == "unlabeled");
  REQUIRE(r.summaries.size() == 2);
  CHECK(r.summaries[0].ambe == (r.rows[0].metrics.ambe + r.rows[2].metrics.ambe) / 2);
  CHECK(r.summaries[1].ssi == (r.rows[1].metrics.ssi + r.rows[3].metrics.ssi) / 2);

  std::ostringstream rows, summary;
  write_batch_rows(r, rows);
  write_batch_summary(r, summary);
  CHECK(rows.str().rfind("path,class,method,ambe,psnr,ssi,delta,k_h1,k_h2,k_h3,fitness\n", 0) == 0);
  CHECK(summary.str().rfind("method,rows,ambe,psnr,psnr_excluded,ssi\n", 0) == 0);

  RunConfig threaded = c;
  threaded.threads = 3;
  const BatchReport again = batch_evaluate(tmp.path(), {Method::kHe, Method::kMvsihe}, threaded, &scorer());
  std::ostringstream rows2;
  write_batch_rows(again, rows2);
  CHECK(rows2.str() == rows.str());
}

TEST_CASE("batch averages leave out infinite PSNR") {
  TempDir tmp("inf");
  save_image(GrayImage(2, 2, std::vector<std::uint8_t>{0, 255, 255, 0}), tmp / "same.pgm");
  save_image(testing::random_image(8, 8, 3), tmp / "rand.pgm");
  const BatchReport r = batch_evaluate(tmp.path(), {Method::kHe}, RunConfig{}, nullptr);
  REQUIRE(r.summaries.size() == 1);
  CHECK(r.summaries[0].psnr_excluded == 1);
  CHECK(r.summaries[0].psnr == r.rows[0].metrics.psnr);
  std::ostringstream rows;
  write_batch_rows(r, rows);
  CHECK(rows.str().find(",inf,") != std::string::npos);
}

TEST_CASE("COA needs quality models in a batch") {
  TempDir tmp("coa");
  CHECK_THROWS_AS(batch_evaluate(tmp.path(), {Method::kCoa}, RunConfig{}, nullptr), ConfigError);
}

TEST_CASE("metric statistics") {
  const MetricStats s = metric_stats({10, 12});
  CHECK(s.variance == 2.0);
  CHECK(s.stddev == doctest::Approx(1.41421356237).epsilon(1e-10));
  CHECK(s.range == 2.0);
  CHECK(s.mean == 11.0);
  const MetricStats inf = metric_stats({5, std::numeric_limits<double>::infinity(), 7});
  CHECK(inf.excluded == 1);
  CHECK(inf.samples == 2);
}

TEST_CASE("stability with a fixed seed has no spread") {
  TempDir tmp("stab");
  save_image(small_photo(2), tmp / "s.png");
  RunConfig c = model_config();
  c.coot.max_iters = 2;
  const StabilityReport r = stability_run({tmp / "s.png"}, 3, c, scorer(), false);
  CHECK(r.cells.size() == 3);
  CHECK(r.ambe.variance == 0.0);
  CHECK(r.ssi.range == 0.0);
  CHECK_THROWS_AS(stability_run({tmp / "s.png"}, 1, c, scorer()), ConfigError);
  CHECK_THROWS_AS(stability_run({tmp / "missing.png"}, 3, c, scorer()), StabilityError);

  const StabilityReport varied = stability_run({tmp / "s.png"}, 2, c, scorer());
  CHECK(varied.cells[0].seed == c.coot.seed);
  CHECK(varied.cells[1].seed == c.coot.seed + 1);
  for (const MetricStats* m : {&varied.ambe, &varied.psnr, &varied.ssi}) {
    CHECK(std::abs(m->stddev - std::sqrt(m->variance)) <= 1e-9);
    CHECK(m->range >= 0);
  }
}

TEST_CASE("trace export") {
  TempDir tmp("trace");
  coot::ConvergenceTrace t{{5.0, 4.5, 4.5}};
  export_trace(t, tmp / "t.csv");
  CHECK(slurp(tmp / "t.csv") == "iteration,best_fitness\n1,5\n2,4.5\n3,4.5\n");
  CHECK_THROWS_AS(export_trace({}, tmp / "e.csv"), ParameterError);
  CHECK_THROWS_AS(export_trace(t, tmp / "missing" / "t.csv"), IoError);
}

TEST_CASE("NIQE training") {
  TempDir tmp("train");
  const GrayImage img = small_photo(1);
  for (int i = 0; i < 10; ++i) save_image(img, tmp / ("copy" + std::to_string(i) + ".png"));
  const niqe::NiqeModel m = train_niqe(tmp.path(), 16, 0.0, tmp / "m.txt");
  CHECK(m.training_vectors == 360);
  const niqe::NiqeModel back = niqe::load_niqe_model(tmp / "m.txt");
  CHECK((back.mean - m.mean).cwiseAbs().maxCoeff() <= 1e-12);

  try {
    train_niqe(tmp.path(), 48, 0.75, {});
    FAIL("expected a training error");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("short by") != std::string::npos);
  }
}

#ifdef COOTMV_CLI_PATH
TEST_CASE("command line exit codes") {
  TempDir tmp("cli");
  const GrayImage img = small_photo();
  save_image(img, tmp / "in.png");
  const std::string in = (tmp / "in.png").string();
  CHECK(run_cli("enhance " + in + " " + (tmp / "o.png").string() + " --iters 2") == 0);
  CHECK(run_cli("enhance " + in + " " + (tmp / "o.png").string() + " --bogus") == 2);
  CHECK(run_cli("enhance " + in + " " + (tmp / "o.png").string() + " --niqe-model /nonexistent") == 2);
  CHECK(run_cli("enhance " + in + " " + (tmp / "o.png").string() + " --fitness psnr") == 2);
  CHECK(run_cli("enhance " + (tmp / "missing.png").string() + " " + (tmp / "o.png").string()) == 3);
  save_image(GrayImage(96, 96, 7), tmp / "blank.png");
  CHECK(run_cli("enhance " + (tmp / "blank.png").string() + " " + (tmp / "o.png").string() + " --iters 1") == 4);
  std::ofstream(tmp / "cfg.json") << R"({"coot": {"max_iters": 0}})";
  CHECK(run_cli("enhance " + in + " " + (tmp / "o.png").string() + " --config " + (tmp / "cfg.json").string()) == 2);
}

TEST_CASE("command line enhance is reproducible") {
  TempDir tmp("det");
  save_image(small_photo(), tmp / "in.png");
  const std::string in = (tmp / "in.png").string();
  for (const char* tag : {"a", "b"}) {
    REQUIRE(run_cli("enhance " + in + " " + (tmp / (std::string(tag) + ".png")).string() + " --seed 7 --iters 3 --trace " +
                    (tmp / (std::string(tag) + ".csv")).string()) == 0);
  }
  CHECK(slurp(tmp / "a.png") == slurp(tmp / "b.png"));
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
}
#endif
