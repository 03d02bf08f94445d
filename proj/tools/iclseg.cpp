// iclseg: choose the number of change-points of a series by conditional ICL.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iclseg/bench.hpp"
#include "iclseg/errors.hpp"
#include "iclseg/icl.hpp"
#include "iclseg/io.hpp"
#include "iclseg/metrics.hpp"
#include "iclseg/oracle.hpp"
#include "iclseg/random.hpp"
#include "iclseg/simulate.hpp"

namespace {

using namespace iclseg;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

struct RunConfig {
  std::string input;
  std::string design;
  double lambda = 9.0;
  std::uint64_t seed = 1;
  std::string family = "poisson";
  std::size_t kmax = 0;  // 0: min(n, 30)
  std::string init = "dp";
  std::optional<double> eta;
  bool per_segment_variance = false;
  std::string format = "json";
  std::string out;
  std::size_t replicates = 1;
  std::vector<std::size_t> sizes{5000, 10000, 20000, 40000};
  int repeats = 3;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::size_t resolve_kmax(const RunConfig& cfg, std::size_t n) {
  return cfg.kmax ? cfg.kmax : std::min<std::size_t>(n, 30);
}

SelectOptions select_options(const RunConfig& cfg, std::size_t n) {
  SelectOptions opt;
  opt.kmax = resolve_kmax(cfg, n);
  opt.family = parse_family(cfg.family);
  opt.init = parse_init_method(cfg.init);
  opt.shared_variance = !cfg.per_segment_variance;
  opt.eta = cfg.eta;
  return opt;
}

std::vector<double> load_series(const RunConfig& cfg) {
  const Family family = parse_family(cfg.family);
  if (!cfg.input.empty() && !cfg.design.empty()) {
    throw InputError("--input and --design are mutually exclusive");
  }
  if (!cfg.input.empty()) return ingest(cfg.input, family);
  if (!cfg.design.empty()) {
    auto series = make_design(parse_design(cfg.design), cfg.lambda, cfg.seed).data;
    validate_series(family, series);
    return series;
  }
  throw InputError("either --input or --design is required");
}

int run_select(const RunConfig& cfg) {
  const auto data = load_series(cfg);
  const IclTable table = select_k(data, select_options(cfg, data.size()));
  Output out(cfg.out);
  if (cfg.format == "csv") {
    write_csv(out.stream(), table);
  } else {
    out.stream() << to_json(table).dump(2) << '\n';
  }
  return kExitOk;
}

int run_simulate(const RunConfig& cfg) {
  if (cfg.design.empty()) throw InputError("simulate needs --design");
  const DesignKind kind = parse_design(cfg.design);
  Output out(cfg.out);

  if (cfg.replicates <= 1) {
    const auto sim = make_design(kind, cfg.lambda, cfg.seed);
    if (cfg.format == "csv") {
      out.stream() << "count\n";
      write_series(out.stream(), sim.data);
    } else {
      nlohmann::json j = {{"design", sim.design.name},
                          {"lambda", cfg.lambda},
                          {"seed", cfg.seed},
                          {"n", sim.data.size()},
                          {"breakpoints", sim.design.truth.breakpoints()},
                          {"means", sim.design.means},
                          {"data", sim.data}};
      out.stream() << j.dump() << '\n';
    }
    return kExitOk;
  }

  // batch: replicate r uses derive_seed(seed, r)
  nlohmann::json rows = nlohmann::json::array();
  std::size_t hits = 0;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    const std::uint64_t seed = derive_seed(cfg.seed, r);
    const auto sim = make_design(kind, cfg.lambda, seed);
    const IclTable table = select_k(sim.data, select_options(cfg, sim.data.size()));
    const std::size_t true_k = sim.design.truth.segment_count();
    hits += table.k_hat == true_k;
    rows.push_back({{"replicate", r},
                    {"seed", seed},
                    {"k_hat", table.k_hat},
                    {"true_k", true_k},
                    {"rand_index", rand_index(table.selected().map, sim.design.truth)}});
  }
  const double fraction = static_cast<double>(hits) / static_cast<double>(cfg.replicates);
  if (cfg.format == "csv") {
    out.stream() << "replicate,seed,k_hat,true_k,rand_index\n";
    for (const auto& row : rows) {
      out.stream() << row["replicate"] << ',' << row["seed"] << ',' << row["k_hat"] << ','
                   << row["true_k"] << ',' << row["rand_index"] << '\n';
    }
  } else {
    out.stream() << nlohmann::json{{"design", cfg.design},
                                   {"lambda", cfg.lambda},
                                   {"init", cfg.init},
                                   {"family", cfg.family},
                                   {"replicates", rows},
                                   {"fraction_true_k", fraction}}
                        .dump(2)
                 << '\n';
  }
  return kExitOk;
}

int run_bench(const RunConfig& cfg) {
  const std::size_t segments = cfg.kmax ? cfg.kmax : 40;
  const ScalingReport scaling = measure_scaling(cfg.sizes, segments, cfg.seed, cfg.repeats);

  RunConfig sel = cfg;
  if (sel.design.empty() && sel.input.empty()) sel.design = "small";
  sel.kmax = 0;
  const auto data = load_series(sel);
  const IclTable table = select_k(data, select_options(sel, data.size()));
  const IclTable again = select_k(data, select_options(sel, data.size()));
  bool deterministic = again.k_hat == table.k_hat;
  for (std::size_t k = 0; k < table.records.size(); ++k) {
    deterministic = deterministic && again.records[k].icl == table.records[k].icl;
  }

  nlohmann::json per_k = nlohmann::json::array();
  for (const auto& r : table.records) {
    per_k.push_back({{"k", r.segments}, {"seconds", r.seconds}, {"icl", r.icl}});
  }
  Output out(cfg.out);
  if (cfg.format == "csv") {
    out.stream() << "n,seconds\n";
    for (const auto& p : scaling.points) out.stream() << p.n << ',' << p.seconds << '\n';
    out.stream() << "exponent," << scaling.exponent << '\n';
  } else {
    out.stream() << nlohmann::json{{"scaling", to_json(scaling)},
                                   {"select",
                                    {{"n", table.n},
                                     {"k_hat", table.k_hat},
                                     {"init_seconds", table.init_seconds},
                                     {"per_k", per_k},
                                     {"deterministic", deterministic}}}}
                        .dump(2)
                 << '\n';
  }
  return kExitOk;
}

int run_oracle_check(const RunConfig& cfg) {
  constexpr double tolerance = 1e-8;
  const std::size_t instances = cfg.replicates > 1 ? cfg.replicates : 200;
  const oracle::EquivalenceReport rep = oracle::check_equivalence(instances, cfg.seed);
  const bool ok = rep.passed(tolerance);
  Output out(cfg.out);
  if (cfg.format == "csv") {
    out.stream() << "quantity,max_deviation\n"
                 << "marginal," << rep.marginal << '\n'
                 << "transition," << rep.transition << '\n'
                 << "entropy," << rep.entropy << '\n'
                 << "log_joint," << rep.log_joint << '\n'
                 << "map_mismatches," << rep.map_mismatches << '\n'
                 << "dp_mismatches," << rep.dp_mismatches << '\n';
  } else {
    out.stream() << nlohmann::json{{"instances", rep.instances},
                                   {"marginal", rep.marginal},
                                   {"transition", rep.transition},
                                   {"entropy", rep.entropy},
                                   {"log_joint", rep.log_joint},
                                   {"max_deviation", rep.max_deviation()},
                                   {"map_mismatches", rep.map_mismatches},
                                   {"dp_mismatches", rep.dp_mismatches},
                                   {"tolerance", tolerance},
                                   {"passed", ok}}
                        .dump(2)
                 << '\n';
  }
  return ok ? kExitOk : kExitNumerical;
}

void add_source_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--input", cfg.input, "series file: one value per line, optional header");
  cmd->add_option("--design", cfg.design, "simulated design")
      ->check(CLI::IsMember({"small", "large", "bw"}));
  cmd->add_option("--lambda", cfg.lambda, "gap between alternating segment means")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
}

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--family", cfg.family, "emission family")
      ->check(CLI::IsMember({"normal", "poisson", "negbin"}))
      ->capture_default_str();
  cmd->add_option("--kmax", cfg.kmax, "largest number of segments (default min(n, 30))");
  cmd->add_option("--init", cfg.init, "initial segmentation")
      ->check(CLI::IsMember({"dp", "binseg"}))
      ->capture_default_str();
  cmd->add_option("--eta", cfg.eta, "chain transition probability (default (K-1)/(n-1))")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--per-segment-variance", cfg.per_segment_variance,
                "normal family: fit a variance per segment");
}

void add_output_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", cfg.out, "output path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional ICL selection of the number of change-points"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* select = app.add_subcommand("select", "select K for one series");
  add_source_options(select, cfg);
  add_model_options(select, cfg);
  add_output_options(select, cfg);

  auto* simulate = app.add_subcommand("simulate", "draw designs; with --replicates > 1 run selection on each");
  add_source_options(simulate, cfg);
  add_model_options(simulate, cfg);
  add_output_options(simulate, cfg);
  simulate->add_option("--replicates", cfg.replicates, "number of replicates")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "forward-backward scaling and per-K select timings");
  add_source_options(bench, cfg);
  add_model_options(bench, cfg);
  add_output_options(bench, cfg);
  bench->add_option("--sizes", cfg.sizes, "series lengths for the scaling fit")->delimiter(',');
  bench->add_option("--repeats", cfg.repeats, "timing repeats per length")->capture_default_str();

  auto* check = app.add_subcommand("oracle-check", "compare forward-backward with enumeration");
  check->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  check->add_option("--replicates", cfg.replicates, "number of random instances (default 200)");
  add_output_options(check, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*select) return run_select(cfg);
    if (*simulate) return run_simulate(cfg);
    if (*bench) return run_bench(cfg);
    if (*check) return run_oracle_check(cfg);
  } catch (const NumericalError& e) {
    std::cerr << "iclseg: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InputError& e) {
    std::cerr << "iclseg: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "iclseg: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
