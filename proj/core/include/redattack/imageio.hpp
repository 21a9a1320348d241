#ifndef REDATTACK_IMAGEIO_HPP
#define REDATTACK_IMAGEIO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "redattack/attack.hpp"
#include "redattack/tensor.hpp"

namespace redattack {

// Reads binary PGM (P5) / PPM (P6) with maxval 255, or the lossless REDF
// format (detected by magic). Netpbm bytes are scaled to [0, range_hint]
// (default 1). REDF keeps its stored range unless a hint rescales it.
ImageTensor read_image(const std::filesystem::path& path,
                       std::optional<double> range_hint = std::nullopt);

// P5 for one channel, P6 for three. Pixels are scaled by 255 / L and
// rounded half-up; anything else is UnsupportedFormat.
void write_image(const std::filesystem::path& path, const ImageTensor& image);

// REDF layout, all little-endian:
//   "REDF" | u32 H | u32 W | u32 C | f64 L | f64 pixels[H*W*C]
void write_raw(const std::filesystem::path& path, const ImageTensor& image);
ImageTensor read_raw(const std::filesystem::path& path);

// Writes `image` as REDF when the path ends in ".redf", netpbm otherwise.
void save_image(const std::filesystem::path& path, const ImageTensor& image);

std::string encode_netpbm(const ImageTensor& image);
ImageTensor decode_netpbm(const std::string& bytes, double range = 1.0);

// Free-form echo of the attack settings for the report.
struct ReportContext {
  std::string algorithm = "red";
  std::string oracle;
  std::string source_path;
  std::string reference_path;
  // Algorithm-specific settings echoed verbatim, e.g. the walk step sizes.
  std::vector<std::pair<std::string, double>> extras;
};

// Where write_report puts the trace: "<dir>/<stem>.trace.csv".
std::filesystem::path trace_path_for(const std::filesystem::path& report_path);

// JSON report (config echo, queries_used, metric triple, succeeded) plus
// the trace CSV next to it. The perturbation norm is recomputed from
// `source` at write time.
void write_report(const std::filesystem::path& path, const AttackResult& result,
                  const AttackConfig& config, const ImageTensor& source,
                  const ReportContext& context = {});
void write_trace_csv(const std::filesystem::path& path, const AttackResult& result);

// Shortest round-trip decimal for a double; "inf" / "nan" for non-finite.
std::string format_real(double v);

}  // namespace redattack

#endif  // REDATTACK_IMAGEIO_HPP
