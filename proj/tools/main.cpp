#include <CLI11.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cfmarc/analysis.hpp"
#include "cfmarc/io.hpp"

namespace {

using namespace cfmarc;

const std::vector<Strategy> kAllStrategies = {
    Strategy::kBaseline, Strategy::kLimFb, Strategy::kSufFb,
    Strategy::kSoussi, Strategy::kInsausti};

std::vector<Strategy> parse_strategy_list(const std::string& csv) {
  std::vector<Strategy> out;
  std::istringstream stream(csv);
  std::string token;
  while (std::getline(stream, token, ',')) {
    const std::size_t b = token.find_first_not_of(" \t");
    const std::size_t e = token.find_last_not_of(" \t");
    if (b == std::string::npos)
      throw std::invalid_argument("empty strategy name in list");
    const Strategy s = parse_strategy(token.substr(b, e - b + 1));
    for (Strategy seen : out)
      if (seen == s)
        throw std::invalid_argument("duplicate strategy in list");
    out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("empty strategy list");
  return out;
}

void print_repro(const ScenarioConfig& cfg) {
  std::printf("seed=%" PRIu64 " version=%s config_hash=%016" PRIx64 "\n",
              cfg.seed, kVersion, config_hash(cfg));
}

std::string out_path(const std::string& dir, const std::string& prefix,
                     const std::string& name) {
  return (std::filesystem::path(dir) / (prefix + "_" + name + ".dat"))
      .string();
}

void write_and_report(const std::string& path, const OutputTable& table) {
  write_table(path, table);
  std::printf("wrote %s\n", path.c_str());
}

double checked_ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw std::invalid_argument("table row has zero trials");
  return static_cast<double>(num) / static_cast<double>(den);
}

struct SweepArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string prefix = "sweep";
  std::string strategies = "baseline,lim_fb,suf_fb,soussi,insausti";
  bool components = false;
  bool perfect_rd = false;
};

int do_sweep(const SweepArgs& a) {
  const ScenarioConfig cfg = load_config(a.config_path);
  const std::vector<Strategy> strategies = parse_strategy_list(a.strategies);
  std::filesystem::create_directories(a.out_dir);
  SweepOptions opts;
  opts.perfect_r_rd = a.perfect_rd;
  opts.record_components = a.components;
  const SweepResult sr = run_sweep(cfg, strategies, opts);
  print_repro(cfg);
  for (Strategy s : strategies)
    write_and_report(out_path(a.out_dir, a.prefix, strategy_name(s)),
                     table_from_sweep(sr, s));
  if (a.components) {
    const std::string path = out_path(a.out_dir, a.prefix, "components");
    write_component_table(path, component_table_from_sweep(sr));
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

struct FigureArgs {
  std::string name;
  double trials = 100000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

ScenarioConfig preset_scenario(int M, double delta_sr, std::uint64_t trials,
                               std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.M = M;
  cfg.R = 2.0;
  cfg.delta_sr = delta_sr;
  cfg.delta_rd = 1.0 - delta_sr;
  cfg.kappa = 3.52;
  cfg.snr_grid_db = parse_snr_grid("0:5:40");
  cfg.trials = trials;
  cfg.seed = seed;
  validate(cfg);
  return cfg;
}

int do_figure(const FigureArgs& a) {
  if (!(a.trials >= 1.0) || a.trials > 1e12 ||
      a.trials != std::floor(a.trials))
    throw std::invalid_argument("--trials must be a whole number >= 1");
  const auto trials = static_cast<std::uint64_t>(a.trials);
  std::filesystem::create_directories(a.out_dir);

  if (a.name == "fig2" || a.name == "fig3") {
    const int M = a.name == "fig2" ? 3 : 2;
    const ScenarioConfig cfg = preset_scenario(M, 0.5, trials, a.seed);
    print_repro(cfg);
    const EquationSweep es = run_equation_sweep(cfg);
    for (int m = 1; m <= M; ++m)
      write_and_report(out_path(a.out_dir, a.name, "eq" + std::to_string(m)),
                       table_from_equations(es, m));
    return 0;
  }
  if (a.name == "fig4") {
    const std::pair<double, const char*> cases[] = {
        {0.75, "d075"}, {0.50, "d050"}, {0.25, "d025"}, {0.10, "d010"}};
    SweepOptions opts;
    opts.perfect_r_rd = true;
    for (const auto& [delta_sr, tag] : cases) {
      const ScenarioConfig cfg = preset_scenario(2, delta_sr, trials, a.seed);
      print_repro(cfg);
      const SweepResult sr = run_sweep(cfg, {Strategy::kLimFb}, opts);
      write_and_report(out_path(a.out_dir, a.name, tag),
                       table_from_sweep(sr, Strategy::kLimFb));
    }
    return 0;
  }
  if (a.name == "fig5" || a.name == "fig6" || a.name == "fig7" ||
      a.name == "fig8") {
    const double delta_sr = a.name == "fig5"   ? 0.25
                            : a.name == "fig7" ? 0.75
                                               : 0.50;
    const ScenarioConfig cfg = preset_scenario(2, delta_sr, trials, a.seed);
    SweepOptions opts;
    opts.record_components = a.name != "fig8";
    print_repro(cfg);
    const SweepResult sr = run_sweep(cfg, kAllStrategies, opts);
    for (Strategy s : kAllStrategies)
      write_and_report(out_path(a.out_dir, a.name, strategy_name(s)),
                       table_from_sweep(sr, s));
    if (opts.record_components) {
      const std::string path = out_path(a.out_dir, a.name, "components");
      write_component_table(path, component_table_from_sweep(sr));
      std::printf("wrote %s\n", path.c_str());
    }
    return 0;
  }
  throw std::invalid_argument("unknown figure preset " + a.name +
                              " (expected fig2..fig8)");
}

struct AnalyzeArgs {
  std::string slope_path;
  std::string window;
  std::string column = "outage";
  std::string outage_path;
  std::string throughput_path;
  std::string strategy;
  int sources = 0;
  std::string bounds_kind;
  std::string table_path;
  std::string components_path;
  bool envelope = false;
  double rate = 0.0;
  std::string snr;
};

double strict_stod(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("bad number in ") + what);
  }
  if (used != s.size() || !std::isfinite(v))
    throw std::invalid_argument(std::string("bad number in ") + what);
  return v;
}

std::pair<double, double> parse_window(const std::string& s) {
  const std::size_t colon = s.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
    throw std::invalid_argument("--window must be lo:hi in dB");
  const double lo = strict_stod(s.substr(0, colon), "--window");
  const double hi = strict_stod(s.substr(colon + 1), "--window");
  if (!(lo < hi)) throw std::invalid_argument("--window needs lo < hi");
  return {lo, hi};
}

std::vector<SlopePoint> curve_from_table(const OutputTable& t,
                                         const std::string& column) {
  std::vector<SlopePoint> curve;
  curve.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const StrategyCounters& r = t.rows[i];
    std::uint64_t num = 0;
    if (column == "outage")
      num = r.outage_num;
    else if (column == "direct")
      num = r.direct_outage_num;
    else if (column == "rank")
      num = r.rank_fail_num;
    else
      throw std::invalid_argument(
          "--column must be outage, direct, or rank");
    SlopePoint p;
    p.snr_db = t.sd_snrdb[i];
    p.p_out = checked_ratio(num, r.trial_num);
    p.events = num;
    curve.push_back(p);
  }
  return curve;
}

int do_analyze(const AnalyzeArgs& a) {
  const int modes = !a.slope_path.empty() + !a.outage_path.empty() +
                    !a.throughput_path.empty() + !a.bounds_kind.empty() +
                    static_cast<int>(a.envelope);
  if (modes != 1)
    throw std::invalid_argument(
        "analyze needs exactly one of --slope, --outage, --throughput, "
        "--bounds, --envelope");

  if (!a.slope_path.empty()) {
    const OutputTable t = read_table(a.slope_path);
    const std::vector<SlopePoint> curve = curve_from_table(t, a.column);
    double slope = 0.0;
    if (a.window.empty()) {
      slope = diversity_slope(curve);
    } else {
      const auto [lo, hi] = parse_window(a.window);
      slope = diversity_slope(curve, lo, hi);
    }
    std::printf("%.2f\n", slope);
    return 0;
  }

  if (!a.outage_path.empty()) {
    const OutputTable t = read_table(a.outage_path);
    std::printf("sd_snrdb p_out p_direct p_rankfail\n");
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      std::printf("%s %s %s %s\n", format_double(t.sd_snrdb[i]).c_str(),
                  format_double(outage_prob(t.rows[i])).c_str(),
                  format_double(direct_outage_prob(t.rows[i])).c_str(),
                  format_double(rank_fail_prob(t.rows[i])).c_str());
    return 0;
  }

  if (!a.throughput_path.empty()) {
    if (a.strategy.empty() || a.sources < 1)
      throw std::invalid_argument(
          "--throughput needs --strategy and --sources");
    const Strategy s = parse_strategy(a.strategy);
    const OutputTable t = read_table(a.throughput_path);
    std::printf("sd_snrdb throughput\n");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      double tp = 0.0;
      try {
        tp = throughput(t.rows[i], s, a.sources);
      } catch (const std::logic_error& e) {
        // Round accounting disagrees with the claimed strategy: the
        // table belongs to a different one. User error, not ours.
        throw std::invalid_argument(e.what());
      }
      std::printf("%s %s\n", format_double(t.sd_snrdb[i]).c_str(),
                  format_double(tp).c_str());
    }
    return 0;
  }

  if (!a.bounds_kind.empty()) {
    if (a.table_path.empty() || a.components_path.empty())
      throw std::invalid_argument("--bounds needs --table and --components");
    const bool lim = a.bounds_kind == "lim" || a.bounds_kind == "lim_fb";
    const bool suf = a.bounds_kind == "suf" || a.bounds_kind == "suf_fb";
    if (!lim && !suf)
      throw std::invalid_argument("--bounds must be lim or suf");
    const OutputTable t = read_table(a.table_path);
    const ComponentTable c = read_component_table(a.components_path);
    if (t.sd_snrdb != c.sd_snrdb)
      throw std::invalid_argument(
          "strategy table and component table cover different SNR grids");
    std::printf("sd_snrdb p_out p_bound\n");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const ComponentCounters& cc = c.rows[i];
      if (cc.trial_num != t.rows[i].trial_num)
        throw std::invalid_argument(
            "strategy and component tables come from different runs");
      UnionComponents uc;
      uc.dest_m1 = checked_ratio(cc.dest_m1_fail, cc.trial_num);
      uc.dest_m = checked_ratio(cc.dest_m_fail, cc.trial_num);
      uc.relay_1 = checked_ratio(cc.relay_1_fail, cc.trial_num);
      uc.relay_m = checked_ratio(cc.relay_m_fail, cc.trial_num);
      uc.rd = checked_ratio(cc.rd_fail, cc.trial_num);
      uc.p_def = checked_ratio(cc.def_fail, cc.trial_num);
      const double bound =
          lim ? union_bound_lim_fb(uc) : union_bound_suf_fb(uc);
      std::printf("%s %s %s\n", format_double(t.sd_snrdb[i]).c_str(),
                  format_double(outage_prob(t.rows[i])).c_str(),
                  format_double(bound).c_str());
    }
    return 0;
  }

  // envelope
  if (a.sources < 1 || !(a.rate > 0.0) || a.snr.empty())
    throw std::invalid_argument(
        "--envelope needs --sources, --rate, and --snr");
  const std::vector<double> grid = parse_snr_grid(a.snr);
  std::printf("sd_snrdb p_envelope\n");
  for (double snr_db : grid) {
    const double gamma = std::pow(10.0, snr_db / 10.0);
    std::printf("%s %s\n", format_double(snr_db).c_str(),
                format_double(best_equation_envelope(a.sources, a.rate,
                                                     gamma))
                    .c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Compute-and-forward relaying simulator: outage sweeps over a "
      "two-source-and-up multiple-access relay network"};
  app.require_subcommand(1);

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run a Monte Carlo sweep described by a config file");
  sweep->add_option("--config", sweep_args.config_path,
                    "Config file (key=value lines)")
      ->required();
  sweep->add_option("--out-dir", sweep_args.out_dir,
                    "Output directory, created if missing");
  sweep->add_option("--prefix", sweep_args.prefix, "Output file prefix");
  sweep->add_option("--strategies", sweep_args.strategies,
                    "Comma-separated subset of baseline, lim_fb, suf_fb, "
                    "soussi, insausti");
  sweep->add_flag("--components", sweep_args.components,
                  "Also write per-link failure counters");
  sweep->add_flag("--perfect-rd", sweep_args.perfect_rd,
                  "Treat the relay-destination hop as error-free");

  FigureArgs figure_args;
  CLI::App* figure = app.add_subcommand(
      "figure", "Run a canned experiment preset (fig2..fig8)");
  figure->add_option("name", figure_args.name, "Preset name")->required();
  figure->add_option("--trials", figure_args.trials,
                     "Trials per SNR point (default 100000)");
  figure->add_option("--seed", figure_args.seed, "Base RNG seed");
  figure->add_option("--out-dir", figure_args.out_dir,
                     "Output directory, created if missing");

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Compute derived quantities from stored tables");
  analyze->add_option("--slope", analyze_args.slope_path,
                      "Fit a diversity slope to a table");
  analyze->add_option("--window", analyze_args.window,
                      "Slope fit window lo:hi in dB (default: top 15 dB "
                      "with enough events)");
  analyze->add_option("--column", analyze_args.column,
                      "Counter for --slope: outage, direct, or rank");
  analyze->add_option("--outage", analyze_args.outage_path,
                      "Print outage probabilities from a table");
  analyze->add_option("--throughput", analyze_args.throughput_path,
                      "Print throughput from a table (needs --strategy, "
                      "--sources)");
  analyze->add_option("--strategy", analyze_args.strategy,
                      "Strategy the table was produced with");
  analyze->add_option("--sources", analyze_args.sources,
                      "Number of sources M");
  analyze->add_option("--bounds", analyze_args.bounds_kind,
                      "Print union bounds, lim or suf (needs --table, "
                      "--components)");
  analyze->add_option("--table", analyze_args.table_path,
                      "Strategy table for --bounds");
  analyze->add_option("--components", analyze_args.components_path,
                      "Component table for --bounds");
  analyze->add_flag("--envelope", analyze_args.envelope,
                    "Print the best-equation outage floor (needs "
                    "--sources, --rate, --snr)");
  analyze->add_option("--rate", analyze_args.rate,
                      "Target rate for --envelope");
  analyze->add_option("--snr", analyze_args.snr,
                      "SNR grid for --envelope (list or start:step:stop)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sweep->parsed()) return do_sweep(sweep_args);
    if (figure->parsed()) return do_figure(figure_args);
    if (analyze->parsed()) return do_analyze(analyze_args);
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
}
