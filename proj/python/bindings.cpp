#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "cootmv/brisque.hpp"
#include "cootmv/coot.hpp"
#include "cootmv/enhancement.hpp"
#include "cootmv/errors.hpp"
#include "cootmv/fitness.hpp"
#include "cootmv/fr_metrics.hpp"
#include "cootmv/harness.hpp"
#include "cootmv/image.hpp"
#include "cootmv/niqe.hpp"

namespace py = pybind11;
using namespace cootmv;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

GrayImage from_numpy(const U8Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D uint8 array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  std::vector<std::uint8_t> data(a.data(), a.data() + a.size());
  return GrayImage(w, h, std::move(data));
}

U8Array to_numpy(const GrayImage& img) {
  U8Array out({img.height(), img.width()});
  std::memcpy(out.mutable_data(), img.pixels().data(), img.size());
  return out;
}

py::tuple partition_tuple(const Partition& p) { return py::make_tuple(p.k_h1, p.k_h2, p.k_h3); }

std::vector<double> to_vector(const nss::FeatureVector& f) { return {f.begin(), f.end()}; }

}  // namespace

PYBIND11_MODULE(_cootmv, m) {
  m.doc() = "COA-tuned MVSIHE contrast enhancement and quality metrics";
  py::register_exception<Error>(m, "Error");

  py::class_<GrayImage>(m, "GrayImage")
      .def(py::init(&from_numpy), py::arg("array"))
      .def_property_readonly("width", &GrayImage::width)
      .def_property_readonly("height", &GrayImage::height)
      .def("to_numpy", &to_numpy)
      .def("__eq__", [](const GrayImage& a, const GrayImage& b) { return a == b; })
      .def("__repr__", [](const GrayImage& img) {
        return "<GrayImage " + std::to_string(img.width()) + "x" + std::to_string(img.height()) + ">";
      });

  m.def("load_image", &load_image, py::arg("path"));
  m.def("save_image", &save_image, py::arg("image"), py::arg("path"));
  m.def("compute_histogram", [](const GrayImage& img) {
    const Histogram h = compute_histogram(img);
    return std::vector<std::uint64_t>(h.counts.begin(), h.counts.end());
  });
  m.def("image_mean", &image_mean);

  m.def(
      "variance_split",
      [](const std::vector<std::uint64_t>& counts, int lo, int hi) {
        if (counts.size() != kLevels) throw py::value_error("histogram must have 256 bins");
        Histogram h;
        std::copy(counts.begin(), counts.end(), h.counts.begin());
        for (auto c : counts) h.total += c;
        return variance_split(h, lo, hi);
      },
      py::arg("counts"), py::arg("lo") = 0, py::arg("hi") = 255);
  m.def("mvsihe_partition",
        [](const GrayImage& img) { return partition_tuple(mvsihe_partition(compute_histogram(img))); });
  m.def(
      "mvsihe_enhance",
      [](const GrayImage& img, double delta, std::optional<std::tuple<int, int, int>> partition) {
        EnhancementParams params{delta, std::nullopt};
        if (partition) params.partition = Partition{std::get<0>(*partition), std::get<1>(*partition),
                                                    std::get<2>(*partition)};
        return mvsihe_enhance(img, params);
      },
      py::arg("image"), py::arg("delta") = harness::kBaselineDelta, py::arg("partition") = py::none());
  m.def("classic_he", &classic_he);
  m.def("bbhe", &bbhe);
  m.def("dsihe", &dsihe);

  m.def("ambe", &ambe);
  m.def(
      "psnr", [](const GrayImage& a, const GrayImage& b, bool sqrt_mse) {
        return psnr(a, b, sqrt_mse ? PsnrDenominator::kSqrtMse : PsnrDenominator::kMse);
      },
      py::arg("input"), py::arg("output"), py::arg("sqrt_mse") = false);
  m.def("ssi", &ssi, py::arg("input"), py::arg("output"), py::arg("c1") = kSsiC1, py::arg("c2") = kSsiC2);

  py::class_<brisque::SvrModel>(m, "SvrModel")
      .def_readonly("gamma", &brisque::SvrModel::gamma)
      .def_readonly("bias", &brisque::SvrModel::bias)
      .def_property_readonly("support_vectors",
                             [](const brisque::SvrModel& s) { return s.support_vectors.size(); })
      .def("save", [](const brisque::SvrModel& s, const std::filesystem::path& p) { brisque::save_svr_model(s, p); });
  m.def("load_svr_model", &brisque::load_svr_model);
  m.def("brisque_features", [](const GrayImage& img) { return to_vector(brisque::brisque_features(img)); });
  m.def("brisque_score", [](const GrayImage& img, const brisque::SvrModel& model) {
    return brisque::brisque_score(img, model);
  });

  py::class_<niqe::NiqeModel>(m, "NiqeModel")
      .def_readonly("patch_size", &niqe::NiqeModel::patch_size)
      .def_readonly("threshold", &niqe::NiqeModel::threshold)
      .def_property_readonly("mean", [](const niqe::NiqeModel& n) {
        return std::vector<double>(n.mean.data(), n.mean.data() + n.mean.size());
      })
      .def("save", [](const niqe::NiqeModel& n, const std::filesystem::path& p) { niqe::save_niqe_model(n, p); });
  m.def("load_niqe_model", &niqe::load_niqe_model);
  m.def(
      "niqe_patch_features",
      [](const GrayImage& img, int patch_size, double threshold) {
        std::vector<std::vector<double>> out;
        for (const auto& f : niqe::niqe_patch_features(img, patch_size, threshold)) out.push_back(to_vector(f));
        return out;
      },
      py::arg("image"), py::arg("patch_size") = niqe::kDefaultPatchSize,
      py::arg("threshold") = niqe::kDefaultThreshold);
  m.def(
      "fit_mvg",
      [](const std::vector<std::vector<double>>& rows, int patch_size, double threshold) {
        std::vector<nss::FeatureVector> features;
        for (const auto& r : rows) {
          if (r.size() != nss::kFeatureCount) throw py::value_error("feature rows must have 36 entries");
          nss::FeatureVector f{};
          std::copy(r.begin(), r.end(), f.begin());
          features.push_back(f);
        }
        return niqe::fit_mvg(features, patch_size, threshold);
      },
      py::arg("features"), py::arg("patch_size") = niqe::kDefaultPatchSize,
      py::arg("threshold") = niqe::kDefaultThreshold);
  m.def("niqe_score", &niqe::niqe_score);
  m.def(
      "train_niqe",
      [](const std::filesystem::path& dir, int patch_size, double threshold, const std::filesystem::path& out) {
        return harness::train_niqe(dir, patch_size, threshold, out);
      },
      py::arg("corpus_dir"), py::arg("patch_size") = niqe::kDefaultPatchSize,
      py::arg("threshold") = niqe::kDefaultThreshold, py::arg("out_path") = std::filesystem::path());

  m.def(
      "coot_minimize",
      [](const std::function<double(std::vector<double>)>& fn, std::vector<double> lower, std::vector<double> upper,
         int population, int max_iters, double leader_fraction, double probability_p, std::uint64_t seed) {
        coot::CootConfig config;
        config.population = population;
        config.max_iters = max_iters;
        config.leader_fraction = leader_fraction;
        config.probability_p = probability_p;
        config.seed = seed;
        const coot::SearchSpace space{std::move(lower), std::move(upper)};
        const auto r = coot::run(
            [&](std::span<const double> x) { return fn(std::vector<double>(x.begin(), x.end())); }, space, config);
        py::dict out;
        out["best_position"] = r.best_position;
        out["best_fitness"] = r.best_fitness;
        out["trace"] = r.trace.best_per_iteration;
        out["evaluations"] = r.evaluations;
        return out;
      },
      py::arg("fitness"), py::arg("lower"), py::arg("upper"), py::arg("population") = 10,
      py::arg("max_iters") = 10, py::arg("leader_fraction") = 0.1, py::arg("probability_p") = 0.5,
      py::arg("seed") = 1);

  m.def(
      "enhance",
      [](const GrayImage& img, const niqe::NiqeModel& niqe_model, std::optional<brisque::SvrModel> svr,
         int population, int max_iters, std::uint64_t seed) {
        harness::RunConfig config;
        config.coot.population = population;
        config.coot.max_iters = max_iters;
        config.coot.seed = seed;
        const QualityFitness scorer(niqe_model, std::move(svr));
        const auto r = harness::enhance_one(img, config, scorer);
        py::dict out;
        out["image"] = r.enhanced;
        out["delta"] = r.params.delta;
        out["partition"] = partition_tuple(*r.params.partition);
        out["best_fitness"] = r.run.best_fitness;
        out["trace"] = r.run.trace.best_per_iteration;
        return out;
      },
      py::arg("image"), py::arg("niqe_model"), py::arg("svr_model") = py::none(), py::arg("population") = 10,
      py::arg("max_iters") = 10, py::arg("seed") = 1);
}
