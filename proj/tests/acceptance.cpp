// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: iclseg_acceptance [criterion ...]   (default: all)

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "iclseg/chmm.hpp"
#include "iclseg/bench.hpp"
#include "iclseg/icl.hpp"
#include "iclseg/metrics.hpp"
#include "iclseg/oracle.hpp"
#include "iclseg/random.hpp"
#include "iclseg/seginit.hpp"
#include "iclseg/simulate.hpp"
#include "schema_check.hpp"

using namespace iclseg;

namespace {

// 1
constexpr std::size_t kOracleInstances = 200;
constexpr double kOracleTolerance = 1e-8;
// 2
constexpr std::size_t kEntropyInstances = 1000;
constexpr std::size_t kUniformInstances = 100;
constexpr double kEntropySlack = 1e-10;
constexpr double kUniformTolerance = 1e-8;
// 3
constexpr double kEtaRelTolerance = 1e-6;
// 4
constexpr int kSmallReplicates = 100;
constexpr double kSmallLambdas[] = {1, 2, 3, 5, 9};
constexpr std::size_t kSmallKmax = 30;
constexpr double kSmallAtNine = 0.90;
constexpr double kInversionAllowance = 0.05;
// 5
constexpr int kLargeReplicates = 20;
constexpr std::size_t kLargeKmax = 50;
constexpr double kLargeAtThree = 0.70;
constexpr double kLargeAtFive = 0.80;
// 6
constexpr std::size_t kScalingSegments = 40;
constexpr double kExponentLow = 0.8, kExponentHigh = 1.3;
constexpr double kFullSelectSeconds = 600;
// 7
constexpr std::size_t kDpSmallInstances = 200;
constexpr std::size_t kDpLargeInstances = 200;
constexpr std::size_t kDpLargeLength = 500;
constexpr std::size_t kDpLargeKmax = 20;
// 8
constexpr int kRandPairs = 100;
constexpr std::size_t kRandMaxLength = 200;

constexpr std::uint64_t kSeed = 20130;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double log_choose(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

Outcome oracle_equivalence() {
  const auto rep = oracle::check_equivalence(kOracleInstances, kSeed);
  return {rep.passed(kOracleTolerance),
          fmt("%zu instances; max |dev| mu %.2e pi %.2e H %.2e logjoint %.2e; MAP mismatches %zu",
              rep.instances, rep.marginal, rep.transition, rep.entropy, rep.log_joint,
              rep.map_mismatches)};
}

Outcome entropy_bounds() {
  std::size_t violations = 0;
  double worst_excess = -INFINITY;
  for (std::size_t s = 0; s < kEntropyInstances; ++s) {
    const auto inst = oracle::random_instance(derive_seed(kSeed, s), 2, 200, 10);
    const std::size_t n = inst.data.size(), K = inst.emission.segment_count();
    const double h = entropy(posteriors(forward_backward(make_chmm_spec(inst.emission, n), inst.data)));
    const double bound = log_choose(n - 1, K - 1);
    worst_excess = std::max(worst_excess, h - bound);
    if (h < 0 || h > bound + kEntropySlack) ++violations;
  }
  double worst_gap = 0;
  for (std::size_t s = 0; s < kUniformInstances; ++s) {
    auto inst = oracle::random_instance(derive_seed(kSeed + 1, s), 2, 200, 10);
    const std::size_t n = inst.data.size(), K = inst.emission.segment_count();
    auto& e = inst.emission;
    std::fill(e.means.begin(), e.means.end(), e.means[0]);
    if (!e.variances.empty()) std::fill(e.variances.begin(), e.variances.end(), e.variances[0]);
    const double h = entropy(posteriors(forward_backward(make_chmm_spec(e, n), inst.data)));
    worst_gap = std::max(worst_gap, std::abs(h - log_choose(n - 1, K - 1)));
  }
  return {violations == 0 && worst_gap < kUniformTolerance,
          fmt("%zu random instances, %zu violations, max H - bound %.2e; identical-theta max gap %.2e",
              kEntropyInstances, violations, worst_excess, worst_gap)};
}

Outcome eta_invariance() {
  double worst = 0;
  std::size_t cases = 0;
  for (int s = 0; s < 6; ++s) {
    std::vector<double> data;
    Family family = Family::poisson;
    if (s < 3) {
      data = small_design(1.0 + 2 * s, derive_seed(kSeed, s)).data;
    } else {
      const auto inst = oracle::random_instance(derive_seed(kSeed, 100 + s), 30, 300, 6);
      data = inst.data;
      family = inst.emission.family;
    }
    const std::size_t n = data.size();
    const SegPath path = initial_segmentations(data, family, 10, InitMethod::dp);
    for (std::size_t K = 2; K <= 10; ++K) {
      const double natural = double(K - 1) / double(n - 1);
      std::vector<double> icl;
      for (double eta : {0.01, 0.5, natural, 0.99}) {
        icl.push_back(icl_for_k(data, K, path, InitMethod::dp, {.eta = eta, .log_prior_k = {}}).icl);
      }
      for (double v : icl) worst = std::max(worst, std::abs(v - icl[0]) / std::abs(icl[0]));
      ++cases;
    }
  }
  return {worst < kEtaRelTolerance,
          fmt("%zu (series, K) cases, eta in {0.01, 0.5, (K-1)/(n-1), 0.99}; max relative spread %.2e",
              cases, worst)};
}

double fraction_true_small(double lambda, InitMethod init) {
  int hits = 0;
  for (int r = 0; r < kSmallReplicates; ++r) {
    const auto sim = small_design(lambda, derive_seed(kSeed, r));
    SelectOptions opt;
    opt.kmax = kSmallKmax;
    opt.init = init;
    hits += select_k(sim.data, opt).k_hat == 7;
  }
  return double(hits) / kSmallReplicates;
}

Outcome small_design_reproduction() {
  std::vector<double> dp, bs;
  for (double lambda : kSmallLambdas) {
    dp.push_back(fraction_true_small(lambda, InitMethod::dp));
    bs.push_back(fraction_true_small(lambda, InitMethod::binseg));
  }
  int inversions = 0;
  bool small_drops = true;
  for (std::size_t j = 1; j < dp.size(); ++j) {
    if (dp[j] < dp[j - 1]) {
      ++inversions;
      small_drops = small_drops && dp[j - 1] - dp[j] <= kInversionAllowance + 1e-12;
    }
  }
  bool ordered = true;
  for (std::size_t j = 0; j < dp.size(); ++j) ordered = ordered && bs[j] <= dp[j];
  const bool pass = inversions <= 1 && small_drops && dp.back() >= kSmallAtNine && ordered;
  std::string detail = "P(K=7) lambda=1,2,3,5,9 dp:";
  for (double f : dp) detail += fmt(" %.2f", f);
  detail += " binseg:";
  for (double f : bs) detail += fmt(" %.2f", f);
  return {pass, detail};
}

Outcome large_design_reproduction() {
  double frac[2];
  const double lambdas[2] = {3, 5};
  std::string counts;
  for (int j = 0; j < 2; ++j) {
    int hits = 0;
    std::vector<std::size_t> khat;
    for (int r = 0; r < kLargeReplicates; ++r) {
      const auto sim = large_design(lambdas[j], derive_seed(kSeed, r));
      SelectOptions opt;
      opt.kmax = kLargeKmax;
      const auto k = select_k(sim.data, opt).k_hat;
      hits += k == 40;
      khat.push_back(k);
    }
    frac[j] = double(hits) / kLargeReplicates;
    counts += fmt(" lambda=%g: %.2f (K-hat", lambdas[j], frac[j]);
    for (auto k : khat) counts += fmt(" %zu", k);
    counts += ")";
  }
  return {frac[0] >= kLargeAtThree && frac[1] >= kLargeAtFive,
          fmt("K_max=%zu, P(K=40)", kLargeKmax) + counts};
}

Outcome linear_scaling() {
  const std::size_t sizes[] = {5000, 10000, 20000, 40000};
  const auto report = measure_scaling(sizes, kScalingSegments, kSeed, 3);
  const auto sim = large_design(3.0, kSeed);
  SelectOptions opt;
  opt.kmax = 40;
  const auto start = std::chrono::steady_clock::now();
  const auto table = select_k(sim.data, opt);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string detail = fmt("exponent %.3f (", report.exponent);
  for (const auto& p : report.points) detail += fmt(" n=%zu %.3fs", p.n, p.seconds);
  detail += fmt(" ); full select_k n=50000 K_max=40: %.1fs (init %.1fs), K-hat %zu", seconds,
                table.init_seconds, table.k_hat);
  return {report.exponent >= kExponentLow && report.exponent <= kExponentHigh &&
              seconds < kFullSelectSeconds,
          detail};
}

Outcome dp_exactness() {
  std::size_t small_mismatch = 0, checked = 0;
  for (std::size_t s = 0; s < kDpSmallInstances; ++s) {
    const auto inst = oracle::random_instance(derive_seed(kSeed, s), 4, 12, 4);
    const std::size_t kmax = std::min<std::size_t>(inst.data.size(), 4);
    const auto path = dp_segment(inst.data, inst.model, kmax);
    for (std::size_t k = 1; k <= kmax; ++k, ++checked) {
      small_mismatch += !(path.at(k).changepoints ==
                          oracle::brute_optimal_segmentation(inst.data, inst.model, k));
    }
  }
  std::size_t dominated = 0;
  double worst = INFINITY;
  for (std::size_t s = 0; s < kDpLargeInstances; ++s) {
    const auto inst = oracle::random_instance(derive_seed(kSeed + 7, s), kDpLargeLength,
                                              kDpLargeLength, 12);
    const auto dp = dp_segment(inst.data, inst.model, kDpLargeKmax);
    const auto bs = binary_segmentation(inst.data, inst.model, kDpLargeKmax);
    for (std::size_t k = 1; k <= kDpLargeKmax; ++k) {
      const double gap = dp.at(k).log_likelihood - bs.at(k).log_likelihood;
      worst = std::min(worst, gap);
      dominated += gap < -1e-9 * std::abs(dp.at(k).log_likelihood);
    }
  }
  return {small_mismatch == 0 && dominated == 0,
          fmt("n<=12: %zu/%zu (instance, K) mismatches vs enumeration; n=%zu: %zu cases with binseg "
              "above dp, min(dp - binseg) %.3g",
              small_mismatch, checked, kDpLargeLength, dominated, worst)};
}

Outcome rand_index_correctness() {
  Rng rng(kSeed);
  int mismatches = 0;
  for (int p = 0; p < kRandPairs; ++p) {
    const std::size_t n = 2 + rng.uniform_int(0, kRandMaxLength - 2);
    auto draw = [&] {
      std::vector<std::size_t> bps;
      const double rate = 0.3 * rng.uniform();
      for (std::size_t t = 1; t < n; ++t) {
        if (rng.uniform() < rate) bps.push_back(t);
      }
      return ChangePointSet(n, bps);
    };
    const auto a = draw(), b = draw();
    mismatches += rand_index(a, b) != oracle::naive_rand_index(a, b);
  }
  return {mismatches == 0, fmt("%d pairs, n<=%zu, %d inexact", kRandPairs, kRandMaxLength, mismatches)};
}

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args) {
  const auto out = std::filesystem::temp_directory_path() / "iclseg_acceptance.out";
  const std::string cmd = std::string("\"") + ICLSEG_CLI_PATH + "\" " + args + " > \"" +
                          out.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text.str()};
}

Outcome cli_contract() {
  const Run check = run_cli("oracle-check");
  double deviation = INFINITY;
  try {
    deviation = nlohmann::json::parse(check.out).at("max_deviation").get<double>();
  } catch (const std::exception&) {
  }
  const Run select =
      run_cli("select --input \"" ICLSEG_SOURCE_DIR "/tests/fixtures/small_design_lambda9.csv\"");
  long long k_hat = -1;
  std::size_t violations = 1;
  try {
    const auto doc = nlohmann::json::parse(select.out);
    k_hat = doc.at("k_hat").get<long long>();
    violations = schema_violations(load_json(ICLSEG_SOURCE_DIR "/schema/select_output.schema.json"), doc).size();
  } catch (const std::exception&) {
  }
  return {check.code == 0 && deviation < kOracleTolerance && select.code == 0 && k_hat == 7 &&
              violations == 0,
          fmt("oracle-check exit %d max deviation %.2e; select on fixture exit %d k_hat %lld; "
              "schema violations %zu",
              check.code, deviation, select.code, k_hat, violations)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", oracle_equivalence},
      {2, "entropy bounds", entropy_bounds},
      {3, "eta invariance", eta_invariance},
      {4, "small design", small_design_reproduction},
      {5, "large design", large_design_reproduction},
      {6, "linear scaling", linear_scaling},
      {7, "dp exactness", dp_exactness},
      {8, "rand index", rand_index_correctness},
      {9, "cli contract", cli_contract},
  };
  std::vector<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.push_back(std::atoi(argv[a]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << ", "
              << fmt("%.1fs", s) << "): " << o.detail << std::endl;
    failed += !o.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed" : fmt("%d criteria failed", failed)) << std::endl;
  return failed == 0 ? 0 : 1;
}
