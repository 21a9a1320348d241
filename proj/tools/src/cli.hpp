#ifndef REDATTACK_TOOLS_CLI_HPP
#define REDATTACK_TOOLS_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "redattack/attack.hpp"
#include "redattack/baseline_attack.hpp"

namespace redattack::cli {

enum class Algorithm { kRed, kBoundary };

struct AttackArgs {
  std::filesystem::path source;
  std::filesystem::path reference;
  std::string oracle;
  std::size_t num_classes = 10;  // only used by exec: oracles
  AttackConfig config;
  Algorithm algorithm = Algorithm::kRed;
  double step_orth = 0.01;
  double step_src = 0.01;
  std::optional<double> range;
  std::filesystem::path out;     // empty: no image written
  std::filesystem::path report;  // empty: no report / trace written
};

struct SweepArgs {
  AttackArgs base;
  std::vector<double> delta_mins;
  std::vector<std::size_t> n_pixels;
  std::vector<double> thetas;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir;
};

// Exit codes: 0 attack succeeded, 2 attack ran but found nothing
// adversarial, 1 usage or runtime error.
int cmd_attack(const AttackArgs& args, std::ostream& out, std::ostream& err);

// Runs the Cartesian product delta_min x n x theta x seed with the RED
// attack and writes one trace CSV per cell plus summary.csv to out_dir.
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

// "untargeted" | "targeted" | "targeted:CLASS"
void parse_mode(const std::string& text, AttackConfig& config);

// Comma-separated list; throws std::invalid_argument on empty lists or
// malformed items.
std::vector<double> parse_real_list(const std::string& text);
std::vector<std::uint64_t> parse_count_list(const std::string& text);

// Full command line, argv[0] included.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace redattack::cli

#endif  // REDATTACK_TOOLS_CLI_HPP
