#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcd/diffusion.hpp"
#include "mcd/ldpc.hpp"
#include "mcd/types.hpp"

namespace mcd {

enum class Scheme { single, diversity, preequalized, hard_threshold };

const char* scheme_name(Scheme scheme);
Scheme parse_scheme(const std::string& name);

// Full description of one simulation campaign. Everything downstream of the
// molecule budget sweep is derived deterministically from these fields.
struct SimConfig {
  Scheme scheme = Scheme::single;
  ChannelParams channel;
  int code_n = 200;
  int code_k = 100;
  uint64_t code_seed = 7;
  double memory_duration = 1.4;     // seconds of ISI history kept as taps
  std::vector<double> mm_sweep;     // molecule budgets, ascending
  int max_iter = 10;                // BP iterations per frame
  uint64_t target_frame_errors = 1020;
  uint64_t max_frames = 1000000;    // per-point safety cap
  uint64_t master_seed = 1;
  std::optional<double> beta;       // anti-stream strength, preequalized only
  std::optional<double> threshold;  // detection cut, hard_threshold only
  std::optional<int> hypothesis_bits;  // detector history override
  int workers = 1;                  // never affects results

  SimConfig();
};

void validate(const SimConfig& config);

// Resolved per-sweep state: the tap vector, the code, and the interleaver
// shared by every frame so schemes differ only in the transmission path.
struct SimContext {
  ChannelResponse response;
  LdpcCode code;
  Permutation interleaver;
};

SimContext make_context(const SimConfig& config, ChannelResponse response);
SimContext make_context(const SimConfig& config, ChannelResponse response,
                        LdpcCode code);

enum class StoppedBy { frame_errors, max_frames };

const char* stopped_by_name(StoppedBy value);

struct BerPoint {
  double mm = 0;
  uint64_t frames = 0;
  uint64_t bit_errors = 0;    // message-bit errors, k per frame at stake
  uint64_t frame_errors = 0;  // frames with any message-bit error
  double ber = 0;
  double fer = 0;
  StoppedBy stopped_by = StoppedBy::frame_errors;
  // hard_threshold only: error count of the raw detected codeword bits,
  // n per frame, before any decoding. Zero for soft schemes.
  uint64_t raw_bit_errors = 0;
  double raw_ber = 0;
};

struct BerCurve {
  Scheme scheme = Scheme::single;
  std::string config_digest;
  std::vector<BerPoint> points;
};

struct FrameResult {
  uint64_t bit_errors = 0;
  bool frame_error = false;
  uint64_t raw_bit_errors = 0;
};

// Stable hex digest over every simulation-affecting input: resolved taps,
// code structure, scheme, sweep, seeds, stopping rules. Worker count is
// deliberately excluded.
std::string config_digest(const SimConfig& config, const SimContext& context);

// One frame end to end: random message, encode, transmit per scheme, detect,
// decode, count message-bit errors. Pure function of (context, config, mm,
// frame_index).
FrameResult run_frame(const SimContext& context, const SimConfig& config,
                      double mm, uint64_t frame_index);

// Frames in index order until target_frame_errors or max_frames. Workers
// compute speculative blocks in parallel; the tally scan is sequential, so
// any worker count gives the identical point.
BerPoint run_ber_point(const SimContext& context, const SimConfig& config,
                       double mm);

BerCurve run_sweep(const SimContext& context, const SimConfig& config);

}  // namespace mcd
