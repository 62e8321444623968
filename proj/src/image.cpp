#include "cootmv/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "cootmv/errors.hpp"

namespace cootmv {

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw ParameterError("image dimensions must be at least 1x1");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) throw ParameterError("image dimensions must be at least 1x1");
  if (data_.size() != static_cast<std::size_t>(width) * height)
    throw ParameterError("pixel buffer length does not match width x height");
}

std::array<double, kLevels> Histogram::pdf() const {
  std::array<double, kLevels> p{};
  if (total == 0) return p;
  for (int v = 0; v < kLevels; ++v) p[v] = static_cast<double>(counts[v]) / static_cast<double>(total);
  return p;
}

int Histogram::occupied_bins() const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

bool has_png_signature(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes, const std::string& name) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw FormatError(name + ": " + image.message);

  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw FormatError(name + ": 16-bit PNG is not supported");
  }
  const bool colour = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  // Keep alpha in the decoded buffer so libpng does not composite; it is dropped below.
  image.format = colour ? PNG_FORMAT_RGBA : PNG_FORMAT_GA;
  const int channels = colour ? 4 : 2;

  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw FormatError(name + ": " + msg);
  }

  std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const std::uint8_t* px = &buffer[i * channels];
    gray[i] = colour ? luma_bt601(px[0], px[1], px[2]) : px[0];
  }
  return GrayImage(width, height, std::move(gray));
}

void encode_png_file(const GrayImage& img, const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.pixels().data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot write " + path.string() + ": " + msg);
  }
}

// Netpbm header tokenizer: whitespace separated, '#' comments to end of line.
class PgmHeader {
 public:
  explicit PgmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) throw FormatError("malformed PGM header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000) throw FormatError("PGM header value out of range");
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw FormatError("malformed PGM header");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw FormatError("not a binary PGM (P5)");
  PgmHeader header(bytes);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  if (width < 1 || height < 1) throw FormatError("PGM has zero dimension");
  if (maxval < 1 || maxval > 255) throw FormatError("PGM maxval " + std::to_string(maxval) + " unsupported (8-bit only)");
  const std::size_t offset = header.raster_offset();
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - offset < n) throw FormatError("PGM raster truncated");
  std::vector<std::uint8_t> data(bytes.begin() + offset, bytes.begin() + offset + n);
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

GrayImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (has_png_signature(bytes)) return decode_png(bytes, path.string());
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    try {
      return decode_pgm(bytes);
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  throw FormatError(path.string() + ": unsupported image format");
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  if (img.empty()) throw ParameterError("cannot save an empty image");
  if (lower_extension(path) == ".png") {
    encode_png_file(img, path);
    return;
  }
  const auto bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Histogram compute_histogram(const GrayImage& img) {
  Histogram h;
  for (std::uint8_t v : img.pixels()) ++h.counts[v];
  h.total = img.size();
  return h;
}

double image_mean(const GrayImage& img) {
  if (img.empty()) throw ParameterError("mean of an empty image");
  const std::uint64_t sum = std::accumulate(img.pixels().begin(), img.pixels().end(), std::uint64_t{0});
  return static_cast<double>(sum) / static_cast<double>(img.size());
}

}  // namespace cootmv
