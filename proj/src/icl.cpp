#include "iclseg/icl.hpp"

#include <chrono>
#include <cmath>

#include "iclseg/errors.hpp"
#include "iclseg/parallel.hpp"

namespace iclseg {

namespace {

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

double entropy(const Posteriors& post) {
  const std::size_t n = post.marginal.rows();
  const std::size_t segments = post.marginal.cols();
  double acc = 0.0;
  for (std::size_t k = 0; k < segments; ++k) acc += xlogx(post.marginal(0, k));
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t k = 0; k < segments; ++k) {
      const double mu = post.marginal(i - 1, k);
      if (mu == 0.0) continue;
      acc += mu * (xlogx(post.stay(i, k)) + xlogx(post.advance(i, k)));
    }
  }
  // clamp rounding below zero
  return std::max(0.0, -acc);
}

IclRecord icl_for_k(std::span<const double> data, std::size_t segments, const SegPath& init,
                    InitMethod method, const IclOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (segments < 1 || segments > init.max_segments()) {
    throw InputError("no initial segmentation for K=" + std::to_string(segments));
  }
  const ChangePointSet& cps = init.at(segments).changepoints;
  const ChmmSpec spec = make_chmm_spec(params_from_changepoints(data, cps, init.model),
                                       data.size(), options.eta, options.log_prior_k.value_or(0.0));
  const FBState fb = forward_backward(spec, data);

  IclRecord rec;
  rec.segments = segments;
  rec.log_joint = log_joint(spec, fb);
  rec.entropy = entropy(posteriors(fb));
  rec.icl = -rec.log_joint + rec.entropy;
  rec.map = viterbi(spec, data);
  rec.init = method;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::size_t argmin_icl(std::span<const IclRecord> records) {
  if (records.empty()) throw InputError("no ICL records to select from");
  std::size_t best = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].icl < records[best].icl) best = r;
  }
  return records[best].segments;
}

IclTable select_k(std::span<const double> data, const SegPath& init,
                  const SelectOptions& options) {
  if (options.kmax < 1 || options.kmax > data.size()) {
    throw InputError("kmax must lie in [1, n]");
  }
  if (init.max_segments() < options.kmax) {
    throw InputError("initial segmentations stop before kmax");
  }
  IclOptions per_k;
  per_k.eta = options.eta;
  per_k.log_prior_k = options.log_prior_k.value_or(-std::log(static_cast<double>(options.kmax)));

  IclTable table;
  table.n = data.size();
  table.family = options.family;
  table.init = options.init;
  table.records.resize(options.kmax);
  const std::size_t threads = options.threads ? options.threads : thread_count();
  parallel_for(options.kmax, threads, [&](std::size_t idx) {
    table.records[idx] = icl_for_k(data, idx + 1, init, options.init, per_k);
  });
  table.k_hat = argmin_icl(table.records);
  return table;
}

IclTable select_k(std::span<const double> data, const SelectOptions& options) {
  validate_series(options.family, data);
  if (options.kmax < 1 || options.kmax > data.size()) {
    throw InputError("kmax must lie in [1, n] (kmax=" + std::to_string(options.kmax) +
                     ", n=" + std::to_string(data.size()) + ")");
  }
  const auto start = std::chrono::steady_clock::now();
  const SegPath init = initial_segmentations(data, options.family, options.kmax, options.init,
                                             options.shared_variance);
  const double init_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  IclTable table = select_k(data, init, options);
  table.init_seconds = init_seconds;
  return table;
}

}  // namespace iclseg
