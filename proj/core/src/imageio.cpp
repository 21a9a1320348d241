#include "redattack/imageio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "redattack/error.hpp"
#include "redattack/metrics.hpp"

namespace redattack {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOFailure("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOFailure("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IOFailure("short write to " + path.string());
}

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  std::size_t next_uint() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("netpbm: expected a number at byte " + std::to_string(start));
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(bytes_.data() + start, bytes_.data() + pos_, v);
    if (ec != std::errc()) throw ParseError("netpbm: bad number in header");
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError("netpbm: missing whitespace before raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 2;
};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(const std::string& in, std::size_t offset) {
  if (offset + sizeof(T) > in.size()) throw ParseError("REDF: truncated file");
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, in.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

constexpr char kRedfMagic[4] = {'R', 'E', 'D', 'F'};

ImageTensor decode_raw(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kRedfMagic, 4) != 0) {
    throw ParseError("REDF: bad magic");
  }
  const Shape shape{get_le<std::uint32_t>(bytes, 4), get_le<std::uint32_t>(bytes, 8),
                    get_le<std::uint32_t>(bytes, 12)};
  const double range = get_le<double>(bytes, 16);
  const std::size_t expected = 24 + shape.size() * sizeof(double);
  if (bytes.size() != expected) {
    throw ParseError("REDF: expected " + std::to_string(expected) + " bytes, found " +
                     std::to_string(bytes.size()));
  }
  if (!(range > 0.0) || !std::isfinite(range)) throw ParseError("REDF: invalid range");
  std::vector<double> pixels(shape.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = get_le<double>(bytes, 24 + 8 * i);
  return ImageTensor(shape, std::move(pixels), range);
}

}  // namespace

// --- netpbm ---------------------------------------------------------------

ImageTensor decode_netpbm(const std::string& bytes, double range) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw UnsupportedFormat("not a netpbm file");
  std::size_t channels;
  if (bytes[1] == '5') {
    channels = 1;
  } else if (bytes[1] == '6') {
    channels = 3;
  } else {
    throw UnsupportedFormat(std::string("netpbm variant P") + bytes[1] +
                            " is not supported (binary P5/P6 only)");
  }
  HeaderReader header(bytes);
  const std::size_t width = header.next_uint();
  const std::size_t height = header.next_uint();
  const std::size_t maxval = header.next_uint();
  if (maxval != 255) throw UnsupportedFormat("netpbm maxval " + std::to_string(maxval) + " != 255");
  if (width == 0 || height == 0) throw ParseError("netpbm: zero dimension");
  const std::size_t offset = header.raster_offset();
  const Shape shape{height, width, channels};
  if (bytes.size() < offset + shape.size()) throw ParseError("netpbm: truncated raster");
  std::vector<double> pixels(shape.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = static_cast<double>(static_cast<unsigned char>(bytes[offset + i])) / 255.0 * range;
  }
  return ImageTensor(shape, std::move(pixels), range);
}

std::string encode_netpbm(const ImageTensor& image) {
  const Shape& s = image.shape();
  if (s.channels != 1 && s.channels != 3) {
    throw UnsupportedFormat("netpbm needs 1 or 3 channels, got " + std::to_string(s.channels));
  }
  std::string out = (s.channels == 1 ? "P5\n" : "P6\n") + std::to_string(s.width) + " " +
                    std::to_string(s.height) + "\n255\n";
  const double scale = 255.0 / image.range();
  for (double p : image.pixels()) {
    const double q = std::floor(p * scale + 0.5);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(q, 0.0, 255.0))));
  }
  return out;
}

// --- REDF -----------------------------------------------------------------

void write_raw(const std::filesystem::path& path, const ImageTensor& image) {
  const Shape& s = image.shape();
  std::string out(kRedfMagic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.height));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.width));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.channels));
  put_le<double>(out, image.range());
  for (double p : image.pixels()) put_le<double>(out, p);
  dump(path, out);
}

ImageTensor read_raw(const std::filesystem::path& path) { return decode_raw(slurp(path)); }

ImageTensor read_image(const std::filesystem::path& path, std::optional<double> range_hint) {
  const std::string bytes = slurp(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kRedfMagic, 4) == 0) {
    ImageTensor img = decode_raw(bytes);
    if (!range_hint || *range_hint == img.range()) return img;
    const double k = *range_hint / img.range();
    std::vector<double> px(img.pixels().begin(), img.pixels().end());
    for (auto& p : px) p *= k;
    return ImageTensor(img.shape(), std::move(px), *range_hint);
  }
  return decode_netpbm(bytes, range_hint.value_or(1.0));
}

void write_image(const std::filesystem::path& path, const ImageTensor& image) {
  dump(path, encode_netpbm(image));
}

void save_image(const std::filesystem::path& path, const ImageTensor& image) {
  if (path.extension() == ".redf") {
    write_raw(path, image);
  } else {
    write_image(path, image);
  }
}

// --- reports --------------------------------------------------------------

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::filesystem::path trace_path_for(const std::filesystem::path& report_path) {
  auto p = report_path;
  p.replace_filename(report_path.stem().string() + ".trace.csv");
  return p;
}

void write_trace_csv(const std::filesystem::path& path, const AttackResult& result) {
  std::string out = "query_index,best_l2_sq\n";
  for (const auto& t : result.trace) {
    out += std::to_string(t.query_index);
    out += ',';
    out += format_real(t.best_l2_sq);
    out += '\n';
  }
  dump(path, out);
}

void write_report(const std::filesystem::path& path, const AttackResult& result,
                  const AttackConfig& config, const ImageTensor& source,
                  const ReportContext& context) {
  using ojson = nlohmann::ordered_json;
  auto optional_real = [](const std::optional<double>& v) -> ojson {
    return v ? ojson(*v) : ojson(nullptr);
  };

  ojson cfg;
  cfg["algorithm"] = context.algorithm;
  if (!context.oracle.empty()) cfg["oracle"] = context.oracle;
  if (!context.source_path.empty()) cfg["source"] = context.source_path;
  if (!context.reference_path.empty()) cfg["reference"] = context.reference_path;
  cfg["delta_min"] = config.delta_min;
  cfg["n_pixels"] = config.num_pixels;
  cfg["theta"] = config.theta;
  cfg["max_jump"] = config.max_jump;
  cfg["max_halvings"] = config.max_halvings;
  cfg["max_queries"] = config.max_queries;
  cfg["seed"] = config.seed;
  cfg["mode"] = config.mode == AttackMode::kTargeted ? "targeted" : "untargeted";
  if (config.target) cfg["target"] = config.target->id;
  cfg["restarts"] = config.restarts;
  cfg["range"] = source.range();
  for (const auto& [key, value] : context.extras) cfg[key] = value;

  ojson metrics;
  metrics["perturbation_norm"] = perturbation_norm(result.best_adversarial, source);
  metrics["ssim"] = optional_real(result.metrics.ssim);
  metrics["cc"] = optional_real(result.metrics.cc);

  ojson doc;
  doc["config"] = cfg;
  doc["succeeded"] = result.succeeded;
  doc["queries_used"] = result.queries_used;
  doc["best_label"] = result.best_label ? ojson(result.best_label->id) : ojson(nullptr);
  doc["metrics"] = metrics;
  doc["trace_points"] = result.trace.size();
  doc["trace_csv"] = trace_path_for(path).filename().string();

  dump(path, doc.dump(2) + "\n");
  write_trace_csv(trace_path_for(path), result);
}

}  // namespace redattack
