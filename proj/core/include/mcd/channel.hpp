#pragma once

#include <cstdint>
#include <utility>

#include "mcd/diffusion.hpp"
#include "mcd/types.hpp"

namespace mcd {

// On-off keyed codeword: bit-1 releases molecules_per_one molecules, bit-0
// stays silent. Budgets are real-valued so sweep grids and per-type splits
// stay exact.
struct TxFrame {
  BitVector bits;
  double molecules_per_one = 0;
};

enum class MoleculeType { A, B };

// Per-slot received quantity under the per-tap Gaussian approximation;
// fractional and negative values are in-distribution and never clamped.
struct RxFrame {
  std::vector<double> counts;
  MoleculeType molecule_type = MoleculeType::A;
};

// mean_only forces every arrival term to its expectation (no randomness);
// used by tests that compare against the deterministic ISI convolution.
enum class Noise { gaussian, mean_only };

// Received counts for one frame over an initially empty channel:
//   counts[i] = sum over lag l = 0..memory of bits[i-l] * g_l,
// g_l Gaussian with mean mm*p[l] and variance mm*p[l]*(1-p[l]), drawn
// independently per (slot, lag). Silent and zero-variance terms consume no
// randomness, so identical bit patterns give identical draw sequences.
RxFrame transmit_frame(const TxFrame& frame, const ChannelResponse& response,
                       uint64_t seed, Noise noise = Noise::gaussian);

// Codeword on molecule type A, interleaved codeword on type B, each at half
// the total budget, over independent channels with the same response.
std::pair<RxFrame, RxFrame> transmit_diversity(
    const BitVector& codeword, const Permutation& permutation,
    double mm_total, const ChannelResponse& response, uint64_t seed,
    Noise noise = Noise::gaussian);

// Baseline: the codeword on type A plus a complement "anti" stream on type B
// at beta times the budget; the receiver sees A minus B so anti arrivals
// cancel lingering ISI. Simplified reconstruction of the idea, not a tuned
// equalizer.
RxFrame transmit_preequalized(const BitVector& codeword, double mm,
                              double beta, const ChannelResponse& response,
                              uint64_t seed, Noise noise = Noise::gaussian);

}  // namespace mcd
