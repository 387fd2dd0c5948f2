#include "mcd/channel.hpp"

#include <cmath>

#include "mcd/errors.hpp"
#include "mcd/rng.hpp"

namespace mcd {
namespace {

void validate_tx(const TxFrame& frame, const ChannelResponse& response) {
  validate(response);
  if (frame.bits.empty()) throw validation_error("frame must be non-empty");
  for (uint8_t b : frame.bits) {
    if (b > 1) throw validation_error("frame bits must be 0/1");
  }
  if (!std::isfinite(frame.molecules_per_one) || frame.molecules_per_one < 0) {
    throw validation_error("molecules_per_one must be nonnegative");
  }
  if (response.memory + 1 > int(response.p.size())) {
    throw validation_error("channel response too short for its memory");
  }
}

std::vector<double> synthesize(const BitVector& bits, double mm,
                               const ChannelResponse& response, uint64_t seed,
                               Noise noise) {
  const int n = int(bits.size());
  const int taps = response.memory + 1;
  Xoshiro256pp rng(derive_seed(seed, seed_tag::channel));
  std::vector<double> counts(size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0;
    for (int l = 0; l < taps && l <= i; ++l) {
      if (!bits[size_t(i - l)]) continue;
      double p = response.p[size_t(l)];
      double mean = mm * p;
      double var = mm * p * (1 - p);
      if (noise == Noise::gaussian && var > 0) {
        acc += normal(rng, mean, std::sqrt(var));
      } else {
        acc += mean;
      }
    }
    counts[size_t(i)] = acc;
  }
  return counts;
}

BitVector permute(const BitVector& bits, const Permutation& perm) {
  BitVector out(bits.size());
  for (size_t j = 0; j < bits.size(); ++j) {
    out[size_t(perm.map[j])] = bits[j];
  }
  return out;
}

}  // namespace

RxFrame transmit_frame(const TxFrame& frame, const ChannelResponse& response,
                       uint64_t seed, Noise noise) {
  validate_tx(frame, response);
  RxFrame rx;
  rx.counts =
      synthesize(frame.bits, frame.molecules_per_one, response, seed, noise);
  rx.molecule_type = MoleculeType::A;
  return rx;
}

std::pair<RxFrame, RxFrame> transmit_diversity(
    const BitVector& codeword, const Permutation& permutation,
    double mm_total, const ChannelResponse& response, uint64_t seed,
    Noise noise) {
  if (permutation.map.size() != codeword.size()) {
    throw validation_error("permutation length != codeword length");
  }
  std::vector<uint8_t> hit(codeword.size(), 0);
  for (int idx : permutation.map) {
    if (idx < 0 || size_t(idx) >= codeword.size() || hit[size_t(idx)]) {
      throw validation_error("not a permutation");
    }
    hit[size_t(idx)] = 1;
  }
  double half = mm_total / 2;
  RxFrame a = transmit_frame({codeword, half}, response,
                             derive_seed(seed, uint64_t(0)), noise);
  RxFrame b = transmit_frame({permute(codeword, permutation), half}, response,
                             derive_seed(seed, uint64_t(1)), noise);
  b.molecule_type = MoleculeType::B;
  return {std::move(a), std::move(b)};
}

RxFrame transmit_preequalized(const BitVector& codeword, double mm,
                              double beta, const ChannelResponse& response,
                              uint64_t seed, Noise noise) {
  if (!std::isfinite(beta) || beta < 0 || beta > 1) {
    throw validation_error("beta must lie in [0, 1]");
  }
  BitVector anti(codeword.size());
  for (size_t i = 0; i < codeword.size(); ++i) {
    if (codeword[i] > 1) throw validation_error("codeword bits must be 0/1");
    anti[i] = uint8_t(1 - codeword[i]);
  }
  RxFrame a = transmit_frame({codeword, mm}, response,
                             derive_seed(seed, uint64_t(0)), noise);
  RxFrame b = transmit_frame({anti, beta * mm}, response,
                             derive_seed(seed, uint64_t(1)), noise);
  for (size_t i = 0; i < a.counts.size(); ++i) a.counts[i] -= b.counts[i];
  return a;
}

}  // namespace mcd
