#include "mcd/detection.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>

#include "mcd/errors.hpp"
#include "mcd/rng.hpp"

namespace mcd {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

// terms below max - kExpDrop contribute < 4e-18 relative and are skipped
constexpr double kExpDrop = 40.0;

double log_sum(const std::vector<double>& terms, size_t count) {
  double peak = terms[0];
  for (size_t j = 1; j < count; ++j) peak = std::max(peak, terms[j]);
  double acc = 0;
  for (size_t j = 0; j < count; ++j) {
    if (terms[j] >= peak - kExpDrop) acc += std::exp(terms[j] - peak);
  }
  return peak + std::log(acc);
}

// Shared marginalizer: per lag l >= 1, tap_mean[l-1][b] / tap_var[l-1][b]
// give the contribution of history bit value b; cur_* the current bit's.
// Hypothesis index j encodes the previous bits, bit l-1 of j being the bit
// at distance l. Prefix consistency lets every position reuse one table,
// truncated to its own history length.
LlrVector marginalize_llrs(const std::vector<double>& counts, int depth,
                           const double cur_mean[2], const double cur_var[2],
                           const std::vector<std::array<double, 2>>& tap_mean,
                           const std::vector<std::array<double, 2>>& tap_var,
                           double var_floor) {
  const size_t n = counts.size();
  LlrVector llr(n, 0.0);

  const size_t hyp = size_t(1) << depth;
  std::vector<double> mean_h(hyp, 0.0), var_h(hyp, 0.0);
  for (int l = 0; l < depth; ++l) {
    mean_h[0] += tap_mean[size_t(l)][0];
    var_h[0] += tap_var[size_t(l)][0];
  }
  for (size_t j = 1; j < hyp; ++j) {
    int lowest = std::countr_zero(j);
    mean_h[j] = mean_h[j & (j - 1)] + tap_mean[size_t(lowest)][1] -
                tap_mean[size_t(lowest)][0];
    var_h[j] = var_h[j & (j - 1)] + tap_var[size_t(lowest)][1] -
               tap_var[size_t(lowest)][0];
  }
  // Positions with fewer than depth slots of history marginalize over a
  // prefix of the taps; precompute the missing-tail corrections per length.
  std::vector<double> tail_mean(size_t(depth) + 1, 0.0);
  std::vector<double> tail_var(size_t(depth) + 1, 0.0);
  for (int m = depth - 1; m >= 0; --m) {
    tail_mean[size_t(m)] = tail_mean[size_t(m) + 1] + tap_mean[size_t(m)][0];
    tail_var[size_t(m)] = tail_var[size_t(m) + 1] + tap_var[size_t(m)][0];
  }

  std::vector<double> terms0(hyp), terms1(hyp);
  for (size_t i = 0; i < n; ++i) {
    const int m = std::min<int>(depth, int(i));
    const size_t count = size_t(1) << m;
    const double x = counts[i];
    const double drop_mean = tail_mean[size_t(m)];
    const double drop_var = tail_var[size_t(m)];
    for (size_t j = 0; j < count; ++j) {
      double base_mean = mean_h[j] - drop_mean;
      double base_var = var_h[j] - drop_var;
      double v0 = std::max(base_var + cur_var[0], var_floor);
      double d0 = x - (base_mean + cur_mean[0]);
      terms0[j] = -0.5 * (kLogTwoPi + std::log(v0)) - d0 * d0 * (0.5 / v0);
      double v1 = std::max(base_var + cur_var[1], var_floor);
      double d1 = x - (base_mean + cur_mean[1]);
      terms1[j] = -0.5 * (kLogTwoPi + std::log(v1)) - d1 * d1 * (0.5 / v1);
    }
    double raw = log_sum(terms0, count) - log_sum(terms1, count);
    llr[i] = std::clamp(raw, -kLlrClamp, kLlrClamp);
  }
  return llr;
}

void validate_llr_inputs(const RxFrame& rx, double mm,
                         const ChannelResponse& response,
                         int hypothesis_bits) {
  validate(response);
  if (rx.counts.empty()) throw validation_error("empty received frame");
  for (double c : rx.counts) {
    if (!std::isfinite(c)) throw validation_error("counts must be finite");
  }
  if (!std::isfinite(mm) || mm < 0) {
    throw validation_error("molecule budget must be nonnegative");
  }
  if (hypothesis_bits < -1 || hypothesis_bits > response.memory) {
    throw validation_error("hypothesis depth must be -1 or in [0, memory]");
  }
}

void check_permutation(const Permutation& perm, size_t n, const char* what) {
  if (perm.map.size() != n) {
    throw validation_error(std::string(what) + ": permutation length mismatch");
  }
  std::vector<uint8_t> hit(n, 0);
  for (int idx : perm.map) {
    if (idx < 0 || size_t(idx) >= n || hit[size_t(idx)]) {
      throw validation_error(std::string(what) + ": not a bijection");
    }
    hit[size_t(idx)] = 1;
  }
}

}  // namespace

Permutation identity_permutation(int n) {
  if (n < 1) throw validation_error("permutation size must be positive");
  Permutation perm;
  perm.map.resize(size_t(n));
  std::iota(perm.map.begin(), perm.map.end(), 0);
  return perm;
}

Permutation random_permutation(int n, uint64_t seed) {
  Permutation perm = identity_permutation(n);
  perm.seed = seed;
  Xoshiro256pp rng(derive_seed(seed, seed_tag::interleaver));
  shuffle(perm.map, rng);
  return perm;
}

LlrVector compute_llrs(const RxFrame& rx, double mm,
                       const ChannelResponse& response, int hypothesis_bits) {
  validate_llr_inputs(rx, mm, response, hypothesis_bits);
  const int depth = hypothesis_bits < 0 ? response.memory : hypothesis_bits;
  if (mm == 0) return LlrVector(rx.counts.size(), 0.0);

  const double p0 = response.p[0];
  const double cur_mean[2] = {0.0, mm * p0};
  const double cur_var[2] = {0.0, mm * p0 * (1 - p0)};
  std::vector<std::array<double, 2>> tap_mean(static_cast<size_t>(depth));
  std::vector<std::array<double, 2>> tap_var(static_cast<size_t>(depth));
  for (int l = 1; l <= depth; ++l) {
    double p = response.p[size_t(l)];
    tap_mean[size_t(l - 1)] = {0.0, mm * p};
    tap_var[size_t(l - 1)] = {0.0, mm * p * (1 - p)};
  }
  return marginalize_llrs(rx.counts, depth, cur_mean, cur_var, tap_mean,
                          tap_var, std::max(1.0, 1e-3 * mm * p0));
}

LlrVector compute_llrs_preequalized(const RxFrame& rx, double mm, double beta,
                                    const ChannelResponse& response,
                                    int hypothesis_bits) {
  validate_llr_inputs(rx, mm, response, hypothesis_bits);
  if (!std::isfinite(beta) || beta < 0 || beta > 1) {
    throw validation_error("beta must lie in [0, 1]");
  }
  const int depth = hypothesis_bits < 0 ? response.memory : hypothesis_bits;
  if (mm == 0) return LlrVector(rx.counts.size(), 0.0);

  const double p0 = response.p[0];
  const double cur_mean[2] = {-beta * mm * p0, mm * p0};
  const double cur_var[2] = {beta * mm * p0 * (1 - p0),
                             mm * p0 * (1 - p0)};
  std::vector<std::array<double, 2>> tap_mean(static_cast<size_t>(depth));
  std::vector<std::array<double, 2>> tap_var(static_cast<size_t>(depth));
  for (int l = 1; l <= depth; ++l) {
    double p = response.p[size_t(l)];
    tap_mean[size_t(l - 1)] = {-beta * mm * p, mm * p};
    tap_var[size_t(l - 1)] = {beta * mm * p * (1 - p), mm * p * (1 - p)};
  }
  return marginalize_llrs(rx.counts, depth, cur_mean, cur_var, tap_mean,
                          tap_var, std::max(1.0, 1e-3 * mm * p0));
}

BitVector interleave(const BitVector& bits, const Permutation& perm) {
  check_permutation(perm, bits.size(), "interleave");
  BitVector out(bits.size());
  for (size_t j = 0; j < bits.size(); ++j) {
    out[size_t(perm.map[j])] = bits[j];
  }
  return out;
}

LlrVector deinterleave_llr(const LlrVector& llr, const Permutation& perm) {
  check_permutation(perm, llr.size(), "deinterleave_llr");
  LlrVector out(llr.size());
  for (size_t j = 0; j < llr.size(); ++j) {
    out[j] = llr[size_t(perm.map[j])];
  }
  return out;
}

LlrVector combine_llrs(const LlrVector& llr_a, const LlrVector& llr_b) {
  if (llr_a.size() != llr_b.size()) {
    throw validation_error("combine_llrs length mismatch");
  }
  LlrVector out(llr_a.size());
  for (size_t i = 0; i < llr_a.size(); ++i) {
    out[i] = std::clamp((llr_a[i] + llr_b[i]) / 2, -kLlrClamp, kLlrClamp);
  }
  return out;
}

BitVector hard_detect(const RxFrame& rx, double threshold) {
  if (!std::isfinite(threshold) || threshold < 0) {
    throw validation_error("threshold must be nonnegative");
  }
  BitVector bits(rx.counts.size());
  for (size_t i = 0; i < rx.counts.size(); ++i) {
    bits[i] = rx.counts[i] >= threshold ? 1 : 0;
  }
  return bits;
}

}  // namespace mcd
