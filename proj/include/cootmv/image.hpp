#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cootmv {

// 8-bit single-channel raster, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<const std::uint8_t> pixels() const noexcept { return data_; }
  std::span<std::uint8_t> pixels() noexcept { return data_; }

  bool same_shape(const GrayImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

inline constexpr int kLevels = 256;

struct Histogram {
  std::array<std::uint64_t, kLevels> counts{};
  std::uint64_t total = 0;

  std::array<double, kLevels> pdf() const;
  int occupied_bins() const;
};

// Decodes binary PGM (P5) or PNG. Colour sources are reduced with BT.601
// luma weights, rounded half up. Sources deeper than 8 bits are rejected.
GrayImage load_image(const std::filesystem::path& path);

// Format follows the extension: .png writes PNG, anything else binary PGM.
void save_image(const GrayImage& img, const std::filesystem::path& path);

GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

// Exact integer form of round(0.299 r + 0.587 g + 0.114 b), half up.
constexpr std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

Histogram compute_histogram(const GrayImage& img);

double image_mean(const GrayImage& img);

}  // namespace cootmv
