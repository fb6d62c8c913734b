#include "cfmarc/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace cfmarc {

namespace {

constexpr const char* kTableHeader =
    "sd_snrdb trial_num outage_num_snr direct_outage rank_fail_num "
    "rounds_total";
constexpr const char* kComponentHeader =
    "sd_snrdb trial_num dest_m1_fail dest_m_fail relay_1_fail relay_m_fail "
    "rd_fail def_fail";

}  // namespace

// Shortest decimal form that parses back to the identical double. Lower
// precision does not imply fewer characters ("1e+01" vs "10"), so compare
// every round-tripping candidate by length.
std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string best = buf;
  for (int prec = 1; prec < 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    if (std::sscanf(buf, "%lf", &back) == 1 && back == v &&
        std::string_view(buf).size() < best.size())
      best = buf;
  }
  return best;
}

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": bad number '" + s +
                                "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": bad integer '" + s +
                                "'");
  }
}

}  // namespace

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kBaseline:
      return "baseline";
    case Strategy::kLimFb:
      return "lim_fb";
    case Strategy::kSufFb:
      return "suf_fb";
    case Strategy::kSoussi:
      return "soussi";
    case Strategy::kInsausti:
      return "insausti";
  }
  throw std::logic_error("unknown strategy");
}

Strategy parse_strategy(const std::string& name) {
  if (name == "baseline") return Strategy::kBaseline;
  if (name == "lim_fb") return Strategy::kLimFb;
  if (name == "suf_fb") return Strategy::kSufFb;
  if (name == "soussi") return Strategy::kSoussi;
  if (name == "insausti") return Strategy::kInsausti;
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::vector<double> parse_snr_grid(const std::string& text) {
  const std::string s = trimmed(text);
  if (s.empty()) throw std::invalid_argument("snr grid: empty");
  std::vector<double> grid;
  if (s.find(':') != std::string::npos) {
    std::istringstream in(s);
    std::string a, b, c;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') ||
        !std::getline(in, c))
      throw std::invalid_argument("snr grid: expected start:step:stop");
    const double start = parse_double(trimmed(a), "snr grid start");
    const double step = parse_double(trimmed(b), "snr grid step");
    const double stop = parse_double(trimmed(c), "snr grid stop");
    if (!(step > 0.0)) throw std::invalid_argument("snr grid: step <= 0");
    if (stop < start - 1e-9)
      throw std::invalid_argument("snr grid: stop < start");
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    return grid;
  }
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string t = trimmed(item);
    if (t.empty()) throw std::invalid_argument("snr grid: empty entry");
    grid.push_back(parse_double(t, "snr grid entry"));
  }
  if (grid.empty()) throw std::invalid_argument("snr grid: empty");
  return grid;
}

ScenarioConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trimmed(t.substr(0, eq));
    const std::string val = trimmed(t.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    if (!kv.emplace(key, val).second)
      throw std::invalid_argument("config: duplicate key '" + key + "'");
  }

  static const char* const kKnown[] = {"m",     "r",      "delta_sr",
                                       "delta_rd", "kappa", "snr_db",
                                       "trials", "seed"};
  for (const auto& [key, val] : kv) {
    bool ok = false;
    for (const char* k : kKnown) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  for (const char* required : {"m", "r", "seed"})
    if (kv.find(required) == kv.end())
      throw std::invalid_argument(std::string("config: missing required '") +
                                  required + "'");

  ScenarioConfig cfg;
  cfg.M = static_cast<int>(parse_u64(kv.at("m"), "m"));
  cfg.R = parse_double(kv.at("r"), "r");
  cfg.seed = parse_u64(kv.at("seed"), "seed");
  cfg.delta_sr = kv.count("delta_sr")
                     ? parse_double(kv.at("delta_sr"), "delta_sr")
                     : 0.5;
  cfg.delta_rd = kv.count("delta_rd")
                     ? parse_double(kv.at("delta_rd"), "delta_rd")
                     : 1.0 - cfg.delta_sr;
  cfg.kappa = kv.count("kappa") ? parse_double(kv.at("kappa"), "kappa")
                                : 3.52;
  cfg.snr_grid_db =
      kv.count("snr_db") ? parse_snr_grid(kv.at("snr_db"))
                         : parse_snr_grid("0:5:40");
  cfg.trials = kv.count("trials") ? parse_u64(kv.at("trials"), "trials")
                                  : 100000;
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_canonical(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "m=" << cfg.M << '\n';
  out << "r=" << format_double(cfg.R) << '\n';
  out << "delta_sr=" << format_double(cfg.delta_sr) << '\n';
  out << "delta_rd=" << format_double(cfg.delta_rd) << '\n';
  out << "kappa=" << format_double(cfg.kappa) << '\n';
  out << "snr_db=";
  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
    if (i) out << ',';
    out << format_double(cfg.snr_grid_db[i]);
  }
  out << '\n';
  out << "trials=" << cfg.trials << '\n';
  out << "seed=" << cfg.seed << '\n';
  return out.str();
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  const std::string canon = config_canonical(cfg);
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : canon) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format_table(const OutputTable& table) {
  if (table.sd_snrdb.size() != table.rows.size())
    throw std::invalid_argument("table: mismatched column lengths");
  std::ostringstream out;
  out << kTableHeader << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const StrategyCounters& c = table.rows[i];
    out << format_double(table.sd_snrdb[i]) << ' ' << c.trial_num << ' '
        << c.outage_num << ' ' << c.direct_outage_num << ' '
        << c.rank_fail_num << ' ' << c.rounds_total << '\n';
  }
  return out.str();
}

OutputTable parse_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trimmed(line) != kTableHeader)
    throw std::invalid_argument("table: bad or missing header");
  OutputTable table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    std::istringstream row(t);
    std::string f[6];
    for (auto& fld : f)
      if (!(row >> fld))
        throw std::invalid_argument("table line " + std::to_string(lineno) +
                                    ": expected 6 fields");
    std::string extra;
    if (row >> extra)
      throw std::invalid_argument("table line " + std::to_string(lineno) +
                                  ": trailing fields");
    StrategyCounters c;
    table.sd_snrdb.push_back(parse_double(f[0], "sd_snrdb"));
    c.trial_num = parse_u64(f[1], "trial_num");
    c.outage_num = parse_u64(f[2], "outage_num_snr");
    c.direct_outage_num = parse_u64(f[3], "direct_outage");
    c.rank_fail_num = parse_u64(f[4], "rank_fail_num");
    c.rounds_total = parse_u64(f[5], "rounds_total");
    table.rows.push_back(c);
  }
  return table;
}

void write_table(const std::string& path, const OutputTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << format_table(table);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

OutputTable read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str());
}

OutputTable table_from_sweep(const SweepResult& sr, Strategy s) {
  OutputTable table;
  table.sd_snrdb = sr.snr_grid_db;
  for (std::size_t k = 0; k < sr.snr_grid_db.size(); ++k)
    table.rows.push_back(sr.at(s, k));
  return table;
}

OutputTable table_from_equations(const EquationSweep& es, int m) {
  if (m < 1 || m > es.M)
    throw std::invalid_argument("table_from_equations: m out of range");
  OutputTable table;
  table.sd_snrdb = es.snr_grid_db;
  for (const EquationCounters& ec : es.per_snr) {
    StrategyCounters c;
    c.trial_num = ec.trial_num;
    c.outage_num = ec.fail_num[static_cast<std::size_t>(m - 1)];
    c.direct_outage_num = c.outage_num;
    c.rank_fail_num = 0;
    c.rounds_total = ec.trial_num;
    table.rows.push_back(c);
  }
  return table;
}

std::string format_component_table(const ComponentTable& table) {
  if (table.sd_snrdb.size() != table.rows.size())
    throw std::invalid_argument("component table: mismatched lengths");
  std::ostringstream out;
  out << kComponentHeader << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const ComponentCounters& c = table.rows[i];
    out << format_double(table.sd_snrdb[i]) << ' ' << c.trial_num << ' '
        << c.dest_m1_fail << ' ' << c.dest_m_fail << ' ' << c.relay_1_fail
        << ' ' << c.relay_m_fail << ' ' << c.rd_fail << ' ' << c.def_fail
        << '\n';
  }
  return out.str();
}

ComponentTable parse_component_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trimmed(line) != kComponentHeader)
    throw std::invalid_argument("component table: bad or missing header");
  ComponentTable table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    std::istringstream row(t);
    std::string f[8];
    for (auto& fld : f)
      if (!(row >> fld))
        throw std::invalid_argument("component table line " +
                                    std::to_string(lineno) +
                                    ": expected 8 fields");
    std::string extra;
    if (row >> extra)
      throw std::invalid_argument("component table line " +
                                  std::to_string(lineno) +
                                  ": trailing fields");
    ComponentCounters c;
    table.sd_snrdb.push_back(parse_double(f[0], "sd_snrdb"));
    c.trial_num = parse_u64(f[1], "trial_num");
    c.dest_m1_fail = parse_u64(f[2], "dest_m1_fail");
    c.dest_m_fail = parse_u64(f[3], "dest_m_fail");
    c.relay_1_fail = parse_u64(f[4], "relay_1_fail");
    c.relay_m_fail = parse_u64(f[5], "relay_m_fail");
    c.rd_fail = parse_u64(f[6], "rd_fail");
    c.def_fail = parse_u64(f[7], "def_fail");
    table.rows.push_back(c);
  }
  return table;
}

void write_component_table(const std::string& path,
                           const ComponentTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << format_component_table(table);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ComponentTable read_component_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open component table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_component_table(buf.str());
}

ComponentTable component_table_from_sweep(const SweepResult& sr) {
  if (sr.components.size() != sr.snr_grid_db.size())
    throw std::invalid_argument("sweep has no recorded components");
  ComponentTable table;
  table.sd_snrdb = sr.snr_grid_db;
  table.rows = sr.components;
  return table;
}

}  // namespace cfmarc
