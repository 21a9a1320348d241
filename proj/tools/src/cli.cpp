#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "redattack/error.hpp"
#include "redattack/imageio.hpp"
#include "redattack/oracle.hpp"

namespace redattack::cli {

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty item in list '" + text + "'");
    items.push_back(item);
  }
  if (items.empty()) throw std::invalid_argument("empty value list");
  if (text.back() == ',') throw std::invalid_argument("empty item in list '" + text + "'");
  return items;
}

template <typename T>
T parse_number(const std::string& s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

struct Inputs {
  std::unique_ptr<ClassifierOracle> oracle;
  ImageTensor source;
  ImageTensor reference;
};

Inputs load_inputs(const AttackArgs& args) {
  Inputs in;
  in.oracle = make_oracle(args.oracle, args.num_classes);
  in.source = read_image(args.source, args.range);
  in.reference = read_image(args.reference, args.range);
  return in;
}

AttackResult run_selected(const AttackArgs& args, Inputs& in) {
  if (args.algorithm == Algorithm::kBoundary) {
    BoundaryWalkConfig walk;
    walk.max_queries = args.config.max_queries;
    walk.seed = args.config.seed;
    walk.step_orth = args.step_orth;
    walk.step_src = args.step_src;
    walk.mode = args.config.mode;
    walk.target = args.config.target;
    return run_boundary_attack(in.source, in.reference, *in.oracle, walk);
  }
  if (args.config.restarts > 1) {
    const ImageTensor refs[] = {in.reference};
    return run_with_restarts(in.source, refs, *in.oracle, args.config);
  }
  return run_attack(in.source, in.reference, *in.oracle, args.config);
}

void print_summary(std::ostream& out, const AttackResult& r) {
  out << "succeeded=" << (r.succeeded ? "true" : "false") << " queries=" << r.queries_used
      << " pert_norm=" << format_real(r.metrics.pert_norm)
      << " ssim=" << (r.metrics.ssim ? format_real(*r.metrics.ssim) : "n/a")
      << " cc=" << (r.metrics.cc ? format_real(*r.metrics.cc) : "n/a") << '\n';
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("RED_ATTACK_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  return parse_number<std::uint64_t>(s);
}

// Options shared by both subcommands. List-valued ones are bound to
// strings so the sweep can parse them itself.
struct RawFlags {
  std::string mode = "untargeted";
  std::string delta_min = "0.01";
  std::string n_pixels = "20";
  std::string theta = "0.0196";
  std::string seed;
  std::string algorithm = "red";
  double range = 0.0;
};

void add_common(CLI::App& app, AttackArgs& args, RawFlags& raw) {
  app.add_option("--source", args.source, "clean image (PGM/PPM/REDF)")->required();
  app.add_option("--reference", args.reference, "adversarial starting image")->required();
  app.add_option("--oracle", args.oracle, "linear:PATH | centroid:PATH | mlp:PATH | exec:CMD")
      ->required();
  app.add_option("--num-classes", args.num_classes, "class count for exec: oracles")
      ->capture_default_str();
  app.add_option("--max-jump", args.config.max_jump, "initial update step j")
      ->capture_default_str();
  app.add_option("--max-halvings", args.config.max_halvings, "step halvings per update")
      ->capture_default_str();
  app.add_option("--max-queries", args.config.max_queries, "oracle query budget")
      ->capture_default_str();
  app.add_option("--mode", raw.mode, "untargeted | targeted[:CLASS]")->capture_default_str();
  app.add_option("--range", raw.range, "dynamic range L of the pixels (default 1)");
  app.add_option("--delta-min", raw.delta_min, "boundary tolerance")->capture_default_str();
  app.add_option("--n-pixels", raw.n_pixels, "pixels perturbed per probe")->capture_default_str();
  app.add_option("--theta", raw.theta, "relative per-pixel probe size")->capture_default_str();
  app.add_option("--seed", raw.seed, "rng seed (falls back to $RED_ATTACK_SEED, then 0)");
}

void finish_common(AttackArgs& args, const RawFlags& raw) {
  parse_mode(raw.mode, args.config);
  if (raw.range != 0.0) args.range = raw.range;
}

std::uint64_t single_seed(const RawFlags& raw) {
  if (!raw.seed.empty()) return parse_number<std::uint64_t>(raw.seed);
  return env_seed().value_or(0);
}

}  // namespace

void parse_mode(const std::string& text, AttackConfig& config) {
  if (text == "untargeted") {
    config.mode = AttackMode::kUntargeted;
    config.target.reset();
    return;
  }
  const std::string prefix = "targeted";
  if (text.rfind(prefix, 0) != 0) throw std::invalid_argument("unknown mode '" + text + "'");
  config.mode = AttackMode::kTargeted;
  config.target.reset();
  if (text.size() == prefix.size()) return;
  if (text[prefix.size()] != ':') throw std::invalid_argument("unknown mode '" + text + "'");
  config.target = Label{parse_number<std::uint32_t>(text.substr(prefix.size() + 1))};
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> v;
  for (const auto& item : split_commas(text)) v.push_back(parse_number<double>(item));
  return v;
}

std::vector<std::uint64_t> parse_count_list(const std::string& text) {
  std::vector<std::uint64_t> v;
  for (const auto& item : split_commas(text)) v.push_back(parse_number<std::uint64_t>(item));
  return v;
}

int cmd_attack(const AttackArgs& args, std::ostream& out, std::ostream& err) {
  try {
    args.config.validate();
    Inputs in = load_inputs(args);
    const AttackResult result = run_selected(args, in);
    if (!args.out.empty()) save_image(args.out, result.best_adversarial);
    if (!args.report.empty()) {
      ReportContext ctx;
      ctx.oracle = args.oracle;
      ctx.source_path = args.source.string();
      ctx.reference_path = args.reference.string();
      if (args.algorithm == Algorithm::kBoundary) {
        ctx.algorithm = "boundary";
        ctx.extras = {{"step_orth", args.step_orth}, {"step_src", args.step_src}};
      }
      write_report(args.report, result, args.config, in.source, ctx);
    }
    print_summary(out, result);
    return result.succeeded ? 0 : 2;
  } catch (const std::exception& e) {
    err << "red-attack: " << e.what() << '\n';
    return 1;
  }
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.delta_mins.empty() || args.n_pixels.empty() || args.thetas.empty() ||
        args.seeds.empty()) {
      throw std::invalid_argument("sweep lists must not be empty");
    }
    Inputs in = load_inputs(args.base);
    std::filesystem::create_directories(args.out_dir);
    std::ofstream summary(args.out_dir / "summary.csv", std::ios::trunc);
    if (!summary) throw IOFailure("cannot write " + (args.out_dir / "summary.csv").string());
    summary << "delta_min,n,theta,seed,final_norm,ssim,cc,queries_used,succeeded,trace\n";

    std::size_t cell = 0;
    for (double delta : args.delta_mins) {
      for (std::size_t n : args.n_pixels) {
        for (double theta : args.thetas) {
          for (std::uint64_t seed : args.seeds) {
            AttackConfig config = args.base.config;
            config.delta_min = delta;
            config.num_pixels = n;
            config.theta = theta;
            config.seed = seed;
            config.validate();
            const AttackResult r = run_attack(in.source, in.reference, *in.oracle, config);
            const std::string trace = "cell_" + std::to_string(cell++) + ".trace.csv";
            write_trace_csv(args.out_dir / trace, r);
            summary << format_real(delta) << ',' << n << ',' << format_real(theta) << ','
                    << seed << ',' << format_real(r.metrics.pert_norm) << ','
                    << optional_cell(r.metrics.ssim) << ',' << optional_cell(r.metrics.cc) << ','
                    << r.queries_used << ',' << (r.succeeded ? 1 : 0) << ',' << trace << '\n';
          }
        }
      }
    }
    summary.flush();
    if (!summary) throw IOFailure("short write to summary.csv");
    out << cell << " cells written to " << args.out_dir.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "red-attack sweep: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Label-only adversarial attacks under a query budget", "red-attack"};
  app.require_subcommand(1);

  AttackArgs attack;
  RawFlags attack_raw;
  std::string out_path, report_path;
  CLI::App* attack_cmd = app.add_subcommand("attack", "run one attack");
  add_common(*attack_cmd, attack, attack_raw);
  attack_cmd->add_option("--algorithm", attack_raw.algorithm, "red | boundary")
      ->check(CLI::IsMember({"red", "boundary"}))
      ->capture_default_str();
  attack_cmd->add_option("--restarts", attack.config.restarts, "budget-split restarts (red)")
      ->capture_default_str();
  attack_cmd->add_option("--step-orth", attack.step_orth, "boundary walk orthogonal step")
      ->capture_default_str();
  attack_cmd->add_option("--step-src", attack.step_src, "boundary walk source step")
      ->capture_default_str();
  attack_cmd->add_option("--out", out_path, "adversarial image (.pgm/.ppm, or .redf)");
  attack_cmd->add_option("--report", report_path, "JSON report; trace goes to <stem>.trace.csv");

  SweepArgs sweep;
  RawFlags sweep_raw;
  std::string out_dir;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "grid over delta_min, n, theta and seed");
  add_common(*sweep_cmd, sweep.base, sweep_raw);
  sweep_cmd->add_option("--out-dir", out_dir, "directory for traces and summary.csv")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*attack_cmd) {
      finish_common(attack, attack_raw);
      attack.config.delta_min = parse_number<double>(attack_raw.delta_min);
      attack.config.num_pixels = parse_number<std::size_t>(attack_raw.n_pixels);
      attack.config.theta = parse_number<double>(attack_raw.theta);
      attack.config.seed = single_seed(attack_raw);
      attack.algorithm = attack_raw.algorithm == "boundary" ? Algorithm::kBoundary : Algorithm::kRed;
      attack.out = out_path;
      attack.report = report_path;
      return cmd_attack(attack, out, err);
    }
    finish_common(sweep.base, sweep_raw);
    sweep.delta_mins = parse_real_list(sweep_raw.delta_min);
    for (auto n : parse_count_list(sweep_raw.n_pixels)) sweep.n_pixels.push_back(n);
    sweep.thetas = parse_real_list(sweep_raw.theta);
    sweep.seeds = sweep_raw.seed.empty()
                      ? std::vector<std::uint64_t>{env_seed().value_or(0)}
                      : parse_count_list(sweep_raw.seed);
    sweep.out_dir = out_dir;
    return cmd_sweep(sweep, out, err);
  } catch (const std::invalid_argument& e) {
    err << "red-attack: usage: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace redattack::cli
