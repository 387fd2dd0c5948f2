#include "mcd/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>

#include "mcd/channel.hpp"
#include "mcd/detection.hpp"
#include "mcd/errors.hpp"
#include "mcd/rng.hpp"

namespace mcd {
namespace {

// Frames computed ahead per tally round; only a throughput knob, results
// depend solely on the sequential stop rule.
constexpr uint64_t kSpeculativeBlock = 256;

uint64_t scheme_id(Scheme scheme) { return uint64_t(scheme); }

struct Fnv1a {
  uint64_t h = 0xcbf29ce484222325ull;
  void bytes(const void* data, size_t len) {
    auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ull;
    }
  }
  void u64(uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void i32(int v) { u64(uint64_t(int64_t(v))); }
};

}  // namespace

const char* scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::single: return "single";
    case Scheme::diversity: return "diversity";
    case Scheme::preequalized: return "preequalized";
    case Scheme::hard_threshold: return "hard_threshold";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "single") return Scheme::single;
  if (name == "diversity") return Scheme::diversity;
  if (name == "preequalized") return Scheme::preequalized;
  if (name == "hard_threshold") return Scheme::hard_threshold;
  throw validation_error("unknown scheme: " + name);
}

const char* stopped_by_name(StoppedBy value) {
  return value == StoppedBy::frame_errors ? "frame_errors" : "max_frames";
}

SimConfig::SimConfig() {
  mm_sweep.reserve(9);
  for (int i = 0; i < 9; ++i) {
    mm_sweep.push_back(std::pow(10.0, 2.0 + 0.5 * i));
  }
}

void validate(const SimConfig& config) {
  validate(config.channel);
  if (config.code_k < 3) throw validation_error("code_k must be at least 3");
  if (config.code_n != 2 * config.code_k) {
    throw validation_error("code_n must equal 2 * code_k (rate 1/2)");
  }
  if (!(config.memory_duration > 0) ||
      !std::isfinite(config.memory_duration)) {
    throw validation_error("memory_duration must be positive");
  }
  if (config.mm_sweep.empty()) throw validation_error("mm_sweep is empty");
  for (double mm : config.mm_sweep) {
    if (!std::isfinite(mm) || mm < 0) {
      throw validation_error("mm_sweep entries must be finite and >= 0");
    }
  }
  for (size_t i = 1; i < config.mm_sweep.size(); ++i) {
    if (config.mm_sweep[i] <= config.mm_sweep[i - 1]) {
      throw validation_error("mm_sweep must be strictly ascending");
    }
  }
  if (config.max_iter < 1) throw validation_error("max_iter must be >= 1");
  if (config.target_frame_errors < 1) {
    throw validation_error("target_frame_errors must be >= 1");
  }
  if (config.max_frames < 1) throw validation_error("max_frames must be >= 1");
  if (config.beta) {
    if (config.scheme != Scheme::preequalized) {
      throw validation_error("beta is only meaningful for preequalized");
    }
    if (!(*config.beta >= 0 && *config.beta <= 1)) {
      throw validation_error("beta must lie in [0, 1]");
    }
  }
  if (config.threshold) {
    if (config.scheme != Scheme::hard_threshold) {
      throw validation_error("threshold is only meaningful for hard_threshold");
    }
    if (!std::isfinite(*config.threshold) || *config.threshold < 0) {
      throw validation_error("threshold must be finite and >= 0");
    }
  }
  if (config.hypothesis_bits && *config.hypothesis_bits < 0) {
    throw validation_error("hypothesis_bits must be >= 0");
  }
  if (config.workers < 1) throw validation_error("workers must be >= 1");
}

SimContext make_context(const SimConfig& config, ChannelResponse response) {
  return make_context(
      config, response,
      build_regular_code(config.code_n, config.code_k, config.code_seed));
}

SimContext make_context(const SimConfig& config, ChannelResponse response,
                        LdpcCode code) {
  validate(config);
  validate(response);
  if (code.n != config.code_n || code.k != config.code_k) {
    throw validation_error("code dimensions do not match the config");
  }
  if (config.hypothesis_bits && *config.hypothesis_bits > response.memory) {
    throw validation_error("hypothesis_bits exceeds the channel memory");
  }
  SimContext context;
  context.response = std::move(response);
  context.code = std::move(code);
  context.interleaver =
      random_permutation(context.code.n, config.master_seed);
  return context;
}

std::string config_digest(const SimConfig& config,
                          const SimContext& context) {
  Fnv1a fnv;
  fnv.u64(scheme_id(config.scheme));
  fnv.f64(config.memory_duration);
  fnv.u64(config.mm_sweep.size());
  for (double mm : config.mm_sweep) fnv.f64(mm);
  fnv.i32(config.max_iter);
  fnv.u64(config.target_frame_errors);
  fnv.u64(config.max_frames);
  fnv.u64(config.master_seed);
  fnv.u64(config.beta.has_value());
  fnv.f64(config.beta.value_or(1.0));
  fnv.u64(config.threshold.has_value());
  fnv.f64(config.threshold.value_or(-1.0));
  fnv.u64(config.hypothesis_bits.has_value());
  fnv.i32(config.hypothesis_bits.value_or(-1));
  fnv.f64(context.response.slot_width);
  fnv.i32(context.response.memory);
  fnv.u64(context.response.p.size());
  for (double p : context.response.p) fnv.f64(p);
  fnv.i32(context.code.n);
  fnv.i32(context.code.k);
  fnv.u64(context.code.seed);
  for (const auto& cols : context.code.check_cols) {
    for (int c : cols) fnv.i32(c);
  }
  for (int m : context.interleaver.map) fnv.i32(m);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv.h));
  return buf;
}

FrameResult run_frame(const SimContext& context, const SimConfig& config,
                      double mm, uint64_t frame_index) {
  if (!std::isfinite(mm) || mm < 0) {
    throw validation_error("mm must be finite and >= 0");
  }
  const uint64_t frame_seed =
      derive_seed(config.master_seed, seed_tag::frame,
                  scheme_id(config.scheme), std::bit_cast<uint64_t>(mm),
                  frame_index);
  const LdpcCode& code = context.code;
  const ChannelResponse& response = context.response;
  const int hyp = config.hypothesis_bits.value_or(-1);

  Xoshiro256pp msg_rng(derive_seed(frame_seed, seed_tag::message));
  BitVector message(static_cast<size_t>(code.k));
  for (auto& b : message) b = uint8_t(msg_rng() >> 63);
  BitVector codeword = encode(code, message);

  LlrVector llr;
  FrameResult result;
  switch (config.scheme) {
    case Scheme::single: {
      RxFrame rx = transmit_frame({codeword, mm}, response, frame_seed);
      llr = compute_llrs(rx, mm, response, hyp);
      break;
    }
    case Scheme::diversity: {
      auto [rx_a, rx_b] = transmit_diversity(
          codeword, context.interleaver, mm, response, frame_seed);
      LlrVector llr_a = compute_llrs(rx_a, mm / 2, response, hyp);
      LlrVector llr_b = deinterleave_llr(
          compute_llrs(rx_b, mm / 2, response, hyp), context.interleaver);
      llr = combine_llrs(llr_a, llr_b);
      break;
    }
    case Scheme::preequalized: {
      const double beta = config.beta.value_or(1.0);
      RxFrame rx =
          transmit_preequalized(codeword, mm, beta, response, frame_seed);
      llr = compute_llrs_preequalized(rx, mm, beta, response, hyp);
      break;
    }
    case Scheme::hard_threshold: {
      RxFrame rx = transmit_frame({codeword, mm}, response, frame_seed);
      double cut = config.threshold.value_or(mm * response.p[0] / 2);
      BitVector hard = hard_detect(rx, cut);
      llr.resize(hard.size());
      for (size_t i = 0; i < hard.size(); ++i) {
        llr[i] = hard[i] ? -kLlrClamp : kLlrClamp;
        result.raw_bit_errors += hard[i] != codeword[i];
      }
      break;
    }
  }

  DecodeResult decoded = decode_bp(code, llr, config.max_iter);
  for (int j = 0; j < code.k; ++j) {
    result.bit_errors +=
        decoded.decoded[size_t(code.message_cols[size_t(j)])] !=
        message[size_t(j)];
  }
  result.frame_error = result.bit_errors > 0;
  return result;
}

BerPoint run_ber_point(const SimContext& context, const SimConfig& config,
                       double mm) {
  validate(config);
  BerPoint point;
  point.mm = mm;
  uint64_t next_index = 0;
  bool hit_target = false;

  std::vector<FrameResult> block;
  while (!hit_target && next_index < config.max_frames) {
    const uint64_t want =
        config.workers == 1
            ? 1
            : std::min(kSpeculativeBlock, config.max_frames - next_index);
    block.assign(static_cast<size_t>(want), FrameResult{});
    if (config.workers == 1) {
      block[0] = run_frame(context, config, mm, next_index);
    } else {
      const uint64_t n_threads = std::min<uint64_t>(config.workers, want);
      std::vector<std::thread> pool;
      pool.reserve(static_cast<size_t>(n_threads));
      for (uint64_t w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w] {
          for (uint64_t i = w * want / n_threads;
               i < (w + 1) * want / n_threads; ++i) {
            block[static_cast<size_t>(i)] =
                run_frame(context, config, mm, next_index + i);
          }
        });
      }
      for (auto& t : pool) t.join();
    }
    for (uint64_t i = 0; i < want; ++i) {
      const FrameResult& fr = block[static_cast<size_t>(i)];
      ++point.frames;
      point.bit_errors += fr.bit_errors;
      point.frame_errors += fr.frame_error;
      point.raw_bit_errors += fr.raw_bit_errors;
      if (point.frame_errors >= config.target_frame_errors) {
        hit_target = true;
        break;
      }
    }
    next_index += want;
  }

  point.stopped_by =
      hit_target ? StoppedBy::frame_errors : StoppedBy::max_frames;
  point.ber = double(point.bit_errors) /
              (double(point.frames) * double(config.code_k));
  point.fer = double(point.frame_errors) / double(point.frames);
  point.raw_ber = double(point.raw_bit_errors) /
                  (double(point.frames) * double(config.code_n));
  return point;
}

BerCurve run_sweep(const SimContext& context, const SimConfig& config) {
  validate(config);
  BerCurve curve;
  curve.scheme = config.scheme;
  curve.config_digest = config_digest(config, context);
  curve.points.reserve(config.mm_sweep.size());
  for (double mm : config.mm_sweep) {
    curve.points.push_back(run_ber_point(context, config, mm));
  }
  return curve;
}

}  // namespace mcd
