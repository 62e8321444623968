#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cootmv/image.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return COOTMV_TEST_DATA; }
inline std::filesystem::path model_dir() { return COOTMV_MODEL_DIR; }

inline cootmv::GrayImage random_image(int w, int h, std::uint64_t seed, int lo = 0, int hi = 255) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& p : px) p = static_cast<std::uint8_t>(dist(gen));
  return cootmv::GrayImage(w, h, std::move(px));
}

inline cootmv::GrayImage from_values(int w, int h, std::initializer_list<int> values) {
  std::vector<std::uint8_t> px;
  for (int v : values) px.push_back(static_cast<std::uint8_t>(v));
  return cootmv::GrayImage(w, h, std::move(px));
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("cootmv_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
