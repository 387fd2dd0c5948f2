#pragma once

#include <cstdint>

#include "mcd/channel.hpp"
#include "mcd/types.hpp"

namespace mcd {

Permutation identity_permutation(int n);

// Uniform random bijection from a dedicated seed stream.
Permutation random_permutation(int n, uint64_t seed);

// Per-bit LLR (positive favors bit 0) by marginalizing the previous
// min(H, i) bits under the per-tap Gaussian model: each hypothesis h and
// current-bit value c contribute a density with
//   mean  mm * (c*p[0] + sum_l h_l * p[l])
//   var   mm * (c*p[0]*(1-p[0]) + sum_l h_l * p[l]*(1-p[l]))
// variances floored at max(1, 1e-3*mm*p[0]); both hypothesis sums evaluated
// by log-sum-exp; result clamped to +-30. H defaults to response.memory;
// pass hypothesis_bits to shorten the marginalized history. mm = 0 carries
// no information and yields all-zero LLRs.
LlrVector compute_llrs(const RxFrame& rx, double mm,
                       const ChannelResponse& response,
                       int hypothesis_bits = -1);

// Matched companion for the subtraction receiver of transmit_preequalized:
// every bit value b at lag l now contributes either the signal stream
// (mean mm*p[l], b=1) or the anti stream (mean -beta*mm*p[l], b=0), with
// both stream variances additive. Same flooring, log-sum-exp, clamping and
// history-depth rules as compute_llrs; beta = 0 reproduces it exactly.
LlrVector compute_llrs_preequalized(const RxFrame& rx, double mm, double beta,
                                    const ChannelResponse& response,
                                    int hypothesis_bits = -1);

// output[perm.map[j]] = bits[j]
BitVector interleave(const BitVector& bits, const Permutation& perm);

// output[j] = llr[perm.map[j]], restoring codeword bit order
LlrVector deinterleave_llr(const LlrVector& llr, const Permutation& perm);

// Equal-weight diversity combining: (a + b) / 2, clamped to +-30.
LlrVector combine_llrs(const LlrVector& llr_a, const LlrVector& llr_b);

// Fixed-threshold per-slot decision: bit i = 1 iff counts[i] >= threshold.
BitVector hard_detect(const RxFrame& rx, double threshold);

}  // namespace mcd
