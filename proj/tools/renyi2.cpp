#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "acceptance.hpp"
#include "renyi/disk_multipole.hpp"
#include "renyi/errors.hpp"
#include "renyi/halfspace.hpp"
#include "renyi/specfun.hpp"
#include "renyi/worldline.hpp"

using json = nlohmann::ordered_json;
using namespace renyi;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNonConvergent = 2;
constexpr int kExitStatistics = 3;
constexpr int kExitCheckFailed = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError(fmt::format("not a number: '{}'", s));
  return v;
}

// "start:stop:step" (inclusive within half a step), "a,b,c" or a single value.
std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 3) {
    const double start = parse_number(parts[0]), stop = parse_number(parts[1]), step = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start) throw UsageError(fmt::format("bad grid '{}': need start <= stop, step > 0", spec));
    const double count = std::floor((stop - start) / step + 0.5);
    if (count > 1e6) throw UsageError(fmt::format("grid '{}' has too many points", spec));
    std::vector<double> out;
    for (long i = 0; i <= static_cast<long>(count); ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  if (parts.size() != 1) throw UsageError(fmt::format("bad grid '{}'", spec));
  std::vector<double> out;
  for (const auto& p : split(spec, ',')) out.push_back(parse_number(p));
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

// disk:x,y,r | halfplane:offset,nx,ny (points with n.p >= offset), joined by '+' for unions.
PlanarRegion parse_region(const std::string& spec) {
  const auto members = split(spec, '+');
  if (members.size() > 1) {
    std::vector<PlanarRegion> parts;
    for (const auto& m : members) parts.push_back(parse_region(m));
    return PlanarRegion::union_of(std::move(parts));
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError(fmt::format("bad region '{}'", spec));
  const std::string kind = spec.substr(0, colon);
  std::vector<double> v;
  for (const auto& p : split(spec.substr(colon + 1), ',')) v.push_back(parse_number(p));
  if (v.size() != 3) throw UsageError(fmt::format("region '{}' needs three numbers", spec));
  if (kind == "disk") return PlanarRegion::disk({v[0], v[1]}, v[2]);
  if (kind == "halfplane") return PlanarRegion::half_plane(v[0], {v[1], v[2]});
  throw UsageError(fmt::format("unknown region kind '{}'", kind));
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_number() || v.is_boolean()) return v.dump();
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

// Options of one subcommand, bound to variables and recorded for provenance.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& var, const std::string& help) {
    dump_.push_back([name, &var](json& j) { j[name] = var; });
    return app_->add_option("--" + name, var, help)->capture_default_str();
  }
  CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
    dump_.push_back([name, &var](json& j) { j[name] = var; });
    return app_->add_flag("--" + name, var, help);
  }
  json resolved() const {
    json j = json::object();
    for (const auto& d : dump_) d(j);
    return j;
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(json&)>> dump_;
};

struct Output {
  std::string path = "-";
  std::string format;
  bool plot_data = false;
  int threads = 0;
};

struct Command {
  CLI::App* app = nullptr;
  std::unique_ptr<Params> params;
  std::string default_format = "json";
  // Fills results/table; returns the exit status.
  std::function<int(json& results, Table& table, Table& plot)> run;
};

void write_output(const std::string& command, const json& config, const Output& out, const json& results,
                  const Table& table, const Table& plot, const std::string& default_format) {
  std::string format = out.format.empty() ? default_format : out.format;
  if (out.format.empty() && out.path.size() > 4) {
    const std::string ext = out.path.substr(out.path.size() - 4);
    if (ext == ".csv") format = "csv";
    if (ext == "json") format = "json";
  }
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (out.path != "-") {
    file.open(out.path);
    if (!file) throw UsageError(fmt::format("cannot open '{}' for writing", out.path));
    os = &file;
  }
  json doc;
  doc["command"] = command;
  doc["version"] = RENYI2_VERSION;
  doc["config"] = config;
  if (out.plot_data || format == "csv") {
    const Table& t = out.plot_data ? plot : table;
    *os << "# renyi2 " << RENYI2_VERSION << " " << command << " config=" << config.dump() << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) *os << (i ? "," : "") << t.columns[i];
    *os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) *os << (i ? "," : "") << csv_field(row[i]);
      *os << "\n";
    }
  } else if (format == "json") {
    doc["results"] = results;
    *os << doc.dump(2) << "\n";
  } else {
    throw UsageError(fmt::format("unknown format '{}' (csv or json)", format));
  }
  os->flush();
  if (!*os) throw std::runtime_error("failed writing output");
}

json estimate_json(const MCEstimate& e) {
  return {{"mean", e.mean}, {"stderr", e.stderr_}, {"n_samples", e.n_samples}, {"seed", e.seed}};
}

struct McOptions {
  int n_loops = SamplingParams{}.n_loops;
  int n_points = SamplingParams{}.n_points;
  int placements = SamplingParams{}.placements_per_loop;
  std::uint64_t seed = SamplingParams{}.seed;
  double resolution = 0.0;
  std::string s_edges;
  double max_rel_stderr = 0.05;

  void add(Params& p) {
    p.add("n-loops", n_loops, "Loops per stratum (mean; a quarter is the pilot)");
    p.add("n-points", n_points, "Points per loop");
    p.add("placements", placements, "Placements per loop");
    p.add("seed", seed, "Random seed");
    p.add("resolution", resolution, "Bridge refinement floor; 0 = 0.1% of the smallest disk radius");
    p.add("s-edges", s_edges, "Comma-separated stratum edges in loop length s, ascending, 'inf' allowed; empty = auto");
    p.add("max-rel-stderr", max_rel_stderr, "Fail with exit 3 when Dirichlet stderr/mean exceeds this; 0 disables");
  }
  SamplingParams build(int threads) const {
    SamplingParams sp;
    sp.n_loops = n_loops;
    sp.n_points = n_points;
    sp.placements_per_loop = placements;
    sp.seed = seed;
    sp.resolution = resolution;
    sp.max_rel_stderr = max_rel_stderr;
    sp.threads = threads;
    if (!s_edges.empty())
      for (const auto& e : split(s_edges, ','))
        sp.s_edges.push_back(e == "inf" ? std::numeric_limits<double>::infinity() : parse_number(e));
    return sp;
  }
};

Table estimates_table(const SectorEstimates& e) {
  Table t{{"quantity", "mean", "stderr", "n_samples", "seed"}, {}};
  t.rows.push_back({"dirichlet", e.dirichlet.mean, e.dirichlet.stderr_, e.dirichlet.n_samples, e.dirichlet.seed});
  t.rows.push_back({"neumann", e.neumann.mean, e.neumann.stderr_, e.neumann.n_samples, e.neumann.seed});
  const double f = worldline_prefactor();
  t.rows.push_back(
      {"dirichlet_normalized", f * e.dirichlet.mean, f * e.dirichlet.stderr_, e.dirichlet.n_samples, e.dirichlet.seed});
  return t;
}

json sectors_json(const SectorEstimates& e) {
  return {{"dirichlet", estimate_json(e.dirichlet)},
          {"neumann", estimate_json(e.neumann)},
          {"short_loop_fraction", e.short_loop_fraction},
          {"dirichlet_normalized", worldline_prefactor() * e.dirichlet.mean},
          {"dirichlet_normalized_stderr", worldline_prefactor() * e.dirichlet.stderr_}};
}

void require_positive_threads(int threads) {
  if (threads < 0) throw UsageError("--threads must be nonnegative");
}

// Pulls "--config <path>" out of args; returns the parsed file or null.
json take_config(std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) throw UsageError(fmt::format("cannot read config file '{}'", path));
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError(fmt::format("config file '{}': {}", path, e.what()));
    }
  }
  return nullptr;
}

std::vector<std::string> config_tokens(const json& values) {
  std::vector<std::string> out;
  for (const auto& [key, v] : values.items()) {
    std::string text;
    if (v.is_string() && v.get<std::string>().empty())
      continue;  // empty strings select the built-in default
    else if (v.is_string())
      text = v.get<std::string>();
    else if (v.is_number_float())
      text = format_number(v.get<double>());
    else if (v.is_number() || v.is_boolean())
      text = v.dump();
    else
      throw UsageError(fmt::format("config key '{}' must be a scalar", key));
    out.push_back("--" + key + "=" + text);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renyi-2 mutual information between planar regions: multipole, half-space and worldline routes",
               "renyi2"};
  app.set_version_flag("--version", RENYI2_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Output out;
  std::map<std::string, Command> commands;
  auto make = [&](const std::string& name, const std::string& help, const std::string& default_format) -> Command& {
    Command& c = commands[name];
    c.app = app.add_subcommand(name, help);
    c.params = std::make_unique<Params>(c.app);
    c.default_format = default_format;
    c.app->add_option("--config", "JSON config file; command-line flags override it");
    c.params->add("out", out.path, "Output path, '-' for stdout");
    c.params->add("format", out.format, "csv or json; default from the extension or the command")
        ->check(CLI::IsMember({"", "csv", "json"}));
    c.params->add("threads", out.threads, "Worker threads; 0 = RENYI2_THREADS or all cores");
    return c;
  };

  // two-disks
  std::string r_grid = "3:20:0.5";
  int n_max = 20;
  {
    Command& c = make("two-disks", "I2 of two equal coplanar disks versus separation", "csv");
    c.params->add("r-over-R", r_grid, "Center distance over radius: start:stop:step, list or value");
    c.params->add("n-max", n_max, "Multipole truncation");
    c.params->flag("plot-data", out.plot_data, "Emit (r_over_R, I2_total) pairs only");
    c.run = [&](json& results, Table& table, Table& plot) {
      if (n_max < 0) throw UsageError("--n-max must be nonnegative");
      const auto pts = separation_sweep(parse_grid(r_grid), n_max, out.threads);
      table.columns = {"r_over_R", "I2_total", "I2_dirichlet", "I2_neumann", "n_max", "converged"};
      plot.columns = {"r_over_R", "I2_total"};
      results = json::array();
      int status = 0;
      for (const auto& p : pts) {
        json tot = p.converged ? json(p.value.total()) : json(nullptr);
        json dir = p.converged ? json(p.value.dirichlet) : json(nullptr);
        json neu = p.converged ? json(p.value.neumann) : json(nullptr);
        table.rows.push_back({p.r_over_R, tot, dir, neu, n_max, p.converged});
        if (p.converged) plot.rows.push_back({p.r_over_R, p.value.total()});
        json row = {{"r_over_R", p.r_over_R}, {"I2_total", tot}, {"I2_dirichlet", dir},
                    {"I2_neumann", neu},      {"n_max", n_max},  {"converged", p.converged}};
        if (!p.converged) {
          row["message"] = p.message;
          std::cerr << fmt::format("r/R = {}: {}\n", p.r_over_R, p.message);
          status = kExitNonConvergent;
        }
        results.push_back(row);
      }
      return status;
    };
  }

  // half-spaces
  double l = 1.0;
  int order = 2;
  QuadratureSpec quad2 = kDefaultQuadrature2d, quad4 = kDefaultQuadrature4d;
  {
    Command& c = make("half-spaces", "Mutual information per unit edge length of two half-spaces", "json");
    c.params->add("l", l, "Distance between the faces");
    c.params->add("order", order, "Reflections to include (1 or 2)")->check(CLI::Range(1, 2));
    c.params->add("alpha-cutoff", quad2.alpha_cutoff, "Rapidity cutoff of the 2-d integrals");
    c.params->add("nodes", quad2.nodes_per_axis, "Gauss-Legendre nodes per axis, 2-d");
    c.params->add("alpha-cutoff-4d", quad4.alpha_cutoff, "Rapidity cutoff of the 4-d integral");
    c.params->add("nodes-4d", quad4.nodes_per_axis, "Gauss-Legendre nodes per axis, 4-d");
    c.params->add("tolerance", quad2.tolerance, "Relative node-doubling tolerance");
    c.run = [&](json& results, Table& table, Table&) {
      quad4.tolerance = quad2.tolerance;
      const HalfSpacePairGeometry g(l);
      const auto first = first_reflection_halfspaces(g, quad2);
      auto parts = [](const HalfSpaceResult& r) {
        return json{{"dirichlet", r.dirichlet}, {"neumann", r.neumann}, {"total", r.total()}};
      };
      results = {{"l", l}, {"first_reflection", parts(first)}};
      table.columns = {"l", "order", "first_dirichlet", "first_neumann", "second_dirichlet", "second_neumann",
                       "coefficient"};
      if (order == 2) {
        const auto second = second_reflection_halfspaces(g, quad4, out.threads);
        results["second_reflection"] = parts(second);
        results["A2_coefficient"] = l * (first.total() + second.total());
        table.rows.push_back({l, order, first.dirichlet, first.neumann, second.dirichlet, second.neumann,
                              l * (first.total() + second.total())});
      } else {
        results["A1_coefficient"] = l * first.total();
        table.rows.push_back({l, order, first.dirichlet, first.neumann, nullptr, nullptr, l * first.total()});
      }
      return 0;
    };
  }

  // disk-halfspace
  double disk_R = 1.0;
  std::string l_grid = "10";
  {
    Command& c = make("disk-halfspace", "Monopole I2 of a disk facing a half-space", "json");
    c.params->add("R", disk_R, "Disk radius");
    c.params->add("l", l_grid, "Disk-center-to-face distance: start:stop:step, list or value");
    c.params->add("alpha-cutoff", quad2.alpha_cutoff, "Rapidity cutoff");
    c.params->add("nodes", quad2.nodes_per_axis, "Gauss-Legendre nodes per axis");
    c.params->add("tolerance", quad2.tolerance, "Relative node-doubling tolerance");
    c.params->flag("plot-data", out.plot_data, "Emit (l, I2) pairs only");
    c.run = [&](json& results, Table& table, Table& plot) {
      table.columns = {"R", "l", "I2", "I2_l_over_R", "double_integral", "relative_error", "asymptotic"};
      plot.columns = {"l", "I2"};
      results = json::array();
      for (double lv : parse_grid(l_grid)) {
        const DiskHalfSpaceGeometry g(disk_R, lv);
        const auto r = disk_halfspace(g, quad2);
        if (!g.in_asymptotic_regime())
          std::cerr << fmt::format("l = {}: R/l >= 1, monopole result is only indicative\n", lv);
        table.rows.push_back({disk_R, lv, r.value, r.value * lv / disk_R, r.double_integral, r.relative_error,
                              g.in_asymptotic_regime()});
        plot.rows.push_back({lv, r.value});
        results.push_back({{"R", disk_R},
                           {"l", lv},
                           {"I2", r.value},
                           {"double_integral", r.double_integral},
                           {"relative_error", r.relative_error},
                           {"asymptotic", g.in_asymptotic_regime()}});
      }
      return 0;
    };
  }

  // worldline estimators
  McOptions mc;
  std::string region_a = "disk:0,0,1", region_b = "disk:5,0,1";
  std::string tri_a = "disk:0,0,1", tri_b = "disk:6,0,1", tri_c = "disk:3,0,1";
  {
    Command& c = make("worldline-mutual", "Worldline Monte Carlo estimate of the mutual-information integral", "json");
    c.params->add("region-a", region_a, "disk:x,y,r | halfplane:offset,nx,ny, '+' joins a union");
    c.params->add("region-b", region_b, "Second region");
    mc.add(*c.params);
    c.run = [&](json& results, Table& table, Table&) {
      const auto e = estimate_mutual(parse_region(region_a), parse_region(region_b), mc.build(out.threads));
      results = sectors_json(e);
      results["prefactor"] = worldline_prefactor();
      table = estimates_table(e);
      return 0;
    };
  }
  {
    Command& c = make("worldline-tripartite", "Worldline Monte Carlo estimate of the tripartite integral", "json");
    c.params->add("region-a", tri_a, "First region");
    c.params->add("region-b", tri_b, "Second region");
    c.params->add("region-c", tri_c, "Third region");
    mc.add(*c.params);
    c.run = [&](json& results, Table& table, Table&) {
      const auto e = estimate_tripartite(parse_region(tri_a), parse_region(tri_b), parse_region(tri_c),
                                         mc.build(out.threads));
      results = sectors_json(e);
      results["prefactor"] = worldline_prefactor();
      table = estimates_table(e);
      return 0;
    };
  }
  {
    Command& c = make("inequalities", "Per-sample and aggregate inequality checks for three regions", "json");
    c.params->add("region-a", tri_a, "First region");
    c.params->add("region-b", tri_b, "Second region");
    c.params->add("region-c", tri_c, "Third region");
    mc.add(*c.params);
    c.run = [&](json& results, Table& table, Table&) {
      const auto rep = inequality_suite(parse_region(tri_a), parse_region(tri_b), parse_region(tri_c),
                                        mc.build(out.threads));
      results = {{"mutual", sectors_json(rep.mutual)},
                 {"tripartite", sectors_json(rep.tripartite)},
                 {"samples", rep.samples},
                 {"dominance_violations", rep.dominance_violations},
                 {"neumann_violations", rep.neumann_violations},
                 {"checks", json::array()},
                 {"all_pass", rep.all_pass()}};
      table.columns = {"check", "pass", "margin"};
      for (const auto& chk : rep.checks) {
        results["checks"].push_back({{"name", chk.name}, {"pass", chk.pass}, {"margin", chk.margin}});
        table.rows.push_back({chk.name, chk.pass, chk.margin});
        if (!chk.pass) std::cerr << "check failed: " << chk.name << "\n";
      }
      return rep.all_pass() ? 0 : kExitCheckFailed;
    };
  }

  // specfun-table
  int table_n_max = 4;
  std::string xi_grid = "0:2:0.5";
  {
    Command& c = make("specfun-table", "Tabulate the oblate radial functions and disk capacitances", "csv");
    c.params->add("n-max", table_n_max, "Largest degree");
    c.params->add("xi", xi_grid, "Radial coordinate: start:stop:step, list or value");
    c.run = [&](json& results, Table& table, Table&) {
      if (table_n_max < 0) throw UsageError("--n-max must be nonnegative");
      const auto xs = parse_grid(xi_grid);
      for (double x : xs)
        if (x < 0.0) throw UsageError("xi must be nonnegative");
      const auto cd = capacitance_disk(BoundaryCondition::Dirichlet, table_n_max);
      const auto cn = capacitance_disk(BoundaryCondition::Neumann, table_n_max);
      table.columns = {"n", "m", "xi", "j", "h", "C_dirichlet", "C_neumann"};
      results = json::array();
      for (int n = 0; n <= table_n_max; ++n)
        for (int m = -n; m <= n; ++m)
          for (double x : xs) {
            const MultipoleIndex idx(n, m);
            table.rows.push_back({n, m, x, j_fn(idx, x), h_fn(idx, x), cd(idx), cn(idx)});
            results.push_back({{"n", n}, {"m", m}, {"xi", x}, {"j", j_fn(idx, x)}, {"h", h_fn(idx, x)},
                               {"C_dirichlet", cd(idx)}, {"C_neumann", cn(idx)}});
          }
      return 0;
    };
  }

  // acceptance
  acceptance::Options acc;
  std::string only;
  {
    Command& c = make("acceptance", "Run the acceptance suite and report pass/fail per criterion", "json");
    c.params->add("seed", acc.seed, "Base seed of the Monte Carlo criteria");
    c.params->add("placements", acc.placements, "Loop placements per worldline estimate");
    c.params->add("only", only, "Comma-separated criterion ids; empty runs all");
    c.run = [&](json& results, Table& table, Table&) {
      acc.threads = out.threads;
      if (!only.empty())
        for (const auto& id : split(only, ',')) acc.only.push_back(static_cast<int>(parse_number(id)));
      const auto crit = acceptance::run(acc, [&](const acceptance::Criterion& cr) {
        // Progress goes to stderr when the report itself is written to stdout.
        (out.path == "-" ? std::cerr : std::cout) << acceptance::format_line(cr) << std::endl;
      });
      table.columns = {"id", "name", "pass", "seconds", "detail"};
      results = json::array();
      bool all = true;
      for (const auto& cr : crit) {
        all = all && cr.pass;
        table.rows.push_back({cr.id, cr.name, cr.pass, cr.seconds, cr.detail});
        results.push_back(
            {{"id", cr.id}, {"name", cr.name}, {"pass", cr.pass}, {"seconds", cr.seconds}, {"detail", cr.detail}});
      }
      std::cerr << fmt::format("{} of {} criteria passed\n",
                               std::count_if(crit.begin(), crit.end(), [](const auto& cr) { return cr.pass; }),
                               crit.size());
      return all ? 0 : kExitCheckFailed;
    };
  }

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    json config = take_config(args);
    if (!config.is_null()) {
      if (!config.is_object()) throw UsageError("config file must hold a JSON object");
      std::string command = config.value("command", std::string());
      // An output document carries its options under "config".
      const json values = config.contains("config") ? config["config"] : config;
      json options = values;
      if (options.is_object()) options.erase("command");
      auto at = std::find_if(args.begin(), args.end(), [&](const std::string& a) { return commands.count(a) > 0; });
      if (at == args.end()) {
        if (command.empty()) throw UsageError("no command given on the command line or in the config file");
        args.insert(args.begin(), command);
        at = args.begin();
      }
      const auto tokens = config_tokens(options);
      args.insert(at + 1, tokens.begin(), tokens.end());
    }
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : kExitUsage;
    }

    for (auto& [name, c] : commands) {
      if (!c.app->parsed()) continue;
      require_positive_threads(out.threads);
      json results;
      Table table, plot;
      const int status = c.run(results, table, plot);
      if (out.plot_data && plot.columns.empty()) throw UsageError("--plot-data is not available for " + name);
      write_output(name, c.params->resolved(), out, results, table, plot, c.default_format);
      return status;
    }
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NonConvergent& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return kExitNonConvergent;
  } catch (const QuadratureNotConverged& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return kExitNonConvergent;
  } catch (const InsufficientStatistics& e) {
    std::cerr << "insufficient statistics: " << e.what() << "\n";
    return kExitStatistics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
