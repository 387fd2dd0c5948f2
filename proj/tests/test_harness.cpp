#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mcd/errors.hpp"
#include "mcd/harness.hpp"

using namespace mcd;

namespace {

// Short-memory variant of the default geometry keeps unit tests fast; the
// slow full-depth protocol lives in the acceptance run.
SimConfig quick_config() {
  SimConfig cfg;
  cfg.memory_duration = 0.45;
  cfg.mm_sweep = {50, 200, 800};
  cfg.target_frame_errors = 20;
  cfg.max_frames = 600;
  return cfg;
}

SimContext quick_context(const SimConfig& cfg) {
  return make_context(
      cfg, analytic_channel_response(cfg.channel, cfg.memory_duration));
}

}  // namespace

TEST_CASE("defaults follow the reference protocol") {
  SimConfig cfg;
  CHECK(cfg.scheme == Scheme::single);
  CHECK(cfg.code_n == 200);
  CHECK(cfg.code_k == 100);
  CHECK(cfg.memory_duration == 1.4);
  CHECK(cfg.max_iter == 10);
  CHECK(cfg.target_frame_errors == 1020);
  CHECK(cfg.max_frames == 1000000);
  CHECK(cfg.channel.slot_width == 0.15);
  CHECK(cfg.channel.total_time == 2.1);
  REQUIRE(cfg.mm_sweep.size() == 9);
  CHECK(cfg.mm_sweep.front() == doctest::Approx(100.0));
  CHECK(cfg.mm_sweep.back() == doctest::Approx(1e6));
  CHECK(std::is_sorted(cfg.mm_sweep.begin(), cfg.mm_sweep.end()));
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::single, Scheme::diversity, Scheme::preequalized,
                   Scheme::hard_threshold}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_scheme("carrier_pigeon"), validation_error);
}

TEST_CASE("config validation rejects bad field combinations") {
  SimConfig cfg = quick_config();
  SimConfig bad = cfg;
  bad.mm_sweep.clear();
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.mm_sweep = {200, 50};
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.mm_sweep = {50, 50};
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.target_frame_errors = 0;
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.max_frames = 0;
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.max_iter = 0;
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.code_n = 199;
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.beta = 0.5;
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.scheme = Scheme::preequalized;
  bad.beta = 1.5;
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.threshold = 10.0;
  CHECK_THROWS_AS(validate(bad), validation_error);
  bad = cfg;
  bad.workers = 0;
  CHECK_THROWS_AS(validate(bad), validation_error);
}

TEST_CASE("context construction is deterministic and validated") {
  SimConfig cfg = quick_config();
  SimContext a = quick_context(cfg);
  SimContext b = quick_context(cfg);
  CHECK(a.code.check_cols == b.code.check_cols);
  CHECK(a.interleaver.map == b.interleaver.map);
  CHECK(int(a.interleaver.map.size()) == cfg.code_n);
  std::vector<int> sorted = a.interleaver.map;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < cfg.code_n; ++i) CHECK(sorted[size_t(i)] == i);

  LdpcCode wrong = build_regular_code(16, 8, 1);
  CHECK_THROWS_AS(
      make_context(cfg, analytic_channel_response(cfg.channel, 0.45), wrong),
      validation_error);
}

TEST_CASE("frames are pure functions of their inputs") {
  SimConfig cfg = quick_config();
  SimContext ctx = quick_context(cfg);
  for (Scheme s : {Scheme::single, Scheme::diversity, Scheme::preequalized,
                   Scheme::hard_threshold}) {
    cfg.scheme = s;
    FrameResult a = run_frame(ctx, cfg, 50, 3);
    FrameResult b = run_frame(ctx, cfg, 50, 3);
    CHECK(a.bit_errors == b.bit_errors);
    CHECK(a.frame_error == b.frame_error);
    CHECK(a.raw_bit_errors == b.raw_bit_errors);
  }
}

TEST_CASE("huge molecule budgets decode without errors") {
  SimConfig cfg = quick_config();
  SimContext ctx = quick_context(cfg);
  for (Scheme s :
       {Scheme::single, Scheme::diversity, Scheme::preequalized}) {
    cfg.scheme = s;
    for (uint64_t f = 0; f < 20; ++f) {
      CHECK(run_frame(ctx, cfg, 1e8, f).bit_errors == 0);
    }
  }
}

TEST_CASE("zero budget reduces to coin-flip message error rates") {
  SimConfig cfg = quick_config();
  SimContext ctx = quick_context(cfg);
  uint64_t total = 0;
  const int kFrames = 300;
  for (int f = 0; f < kFrames; ++f) {
    FrameResult fr = run_frame(ctx, cfg, 0, uint64_t(f));
    CHECK(fr.frame_error);
    CHECK(fr.bit_errors <= uint64_t(cfg.code_k));
    total += fr.bit_errors;
  }
  double mean_ber = double(total) / (kFrames * cfg.code_k);
  CHECK(mean_ber > 0.45);
  CHECK(mean_ber < 0.55);
}

TEST_CASE("a single guaranteed failure stops immediately") {
  SimConfig cfg = quick_config();
  cfg.target_frame_errors = 1;
  SimContext ctx = quick_context(cfg);
  BerPoint pt = run_ber_point(ctx, cfg, 0);
  CHECK(pt.frames == 1);
  CHECK(pt.frame_errors == 1);
  CHECK(pt.fer == 1.0);
  CHECK(pt.stopped_by == StoppedBy::frame_errors);
}

TEST_CASE("error-free points stop at the frame cap") {
  SimConfig cfg = quick_config();
  cfg.target_frame_errors = 1;
  cfg.max_frames = 5;
  SimContext ctx = quick_context(cfg);
  BerPoint pt = run_ber_point(ctx, cfg, 1e8);
  CHECK(pt.frames == 5);
  CHECK(pt.frame_errors == 0);
  CHECK(pt.ber == 0.0);
  CHECK(pt.fer == 0.0);
  CHECK(pt.stopped_by == StoppedBy::max_frames);
}

TEST_CASE("point tallies equal the sum of their frames") {
  SimConfig cfg = quick_config();
  cfg.target_frame_errors = 9;
  SimContext ctx = quick_context(cfg);
  double mm = 50;
  BerPoint pt = run_ber_point(ctx, cfg, mm);
  uint64_t bits = 0, frames_bad = 0;
  for (uint64_t f = 0; f < pt.frames; ++f) {
    FrameResult fr = run_frame(ctx, cfg, mm, f);
    bits += fr.bit_errors;
    frames_bad += fr.frame_error;
  }
  CHECK(pt.bit_errors == bits);
  CHECK(pt.frame_errors == frames_bad);
  CHECK(pt.ber ==
        double(bits) / (double(pt.frames) * double(cfg.code_k)));
  CHECK(pt.fer == double(frames_bad) / double(pt.frames));
}

TEST_CASE("worker count never changes a point") {
  SimConfig cfg = quick_config();
  SimContext ctx = quick_context(cfg);
  double mm = 0;
  for (double candidate : {30.0, 60.0, 120.0, 240.0}) {
    cfg.target_frame_errors = 1020;
    cfg.max_frames = 40;
    BerPoint scan = run_ber_point(ctx, cfg, candidate);
    if (scan.fer >= 0.1 && scan.fer <= 0.9) {
      mm = candidate;
      break;
    }
  }
  REQUIRE(mm > 0);
  cfg.target_frame_errors = 13;
  cfg.max_frames = 500;
  cfg.workers = 1;
  BerPoint base = run_ber_point(ctx, cfg, mm);
  CHECK(base.stopped_by == StoppedBy::frame_errors);
  for (int workers : {2, 3, 8}) {
    cfg.workers = workers;
    BerPoint pt = run_ber_point(ctx, cfg, mm);
    CHECK(pt.frames == base.frames);
    CHECK(pt.bit_errors == base.bit_errors);
    CHECK(pt.frame_errors == base.frame_errors);
    CHECK(pt.ber == base.ber);
    CHECK(pt.fer == base.fer);
    CHECK(pt.stopped_by == base.stopped_by);
  }
}

TEST_CASE("single-scheme ber never rises with the budget beyond noise") {
  SimConfig cfg = quick_config();
  cfg.target_frame_errors = 40;
  cfg.max_frames = 1500;
  SimContext ctx = quick_context(cfg);
  BerCurve curve = run_sweep(ctx, cfg);
  REQUIRE(curve.points.size() == cfg.mm_sweep.size());
  for (size_t i = 1; i < curve.points.size(); ++i) {
    const BerPoint& lo = curve.points[i - 1];
    const BerPoint& hi = curve.points[i];
    auto se = [&](const BerPoint& p) {
      return std::sqrt(std::max(p.ber * (1 - p.ber), 1e-12) /
                       (double(p.frames) * cfg.code_k));
    };
    double sigma = std::sqrt(se(lo) * se(lo) + se(hi) * se(hi));
    CHECK(lo.ber >= hi.ber - 3 * sigma);
  }
}

TEST_CASE("sweeps are per-point identical to direct calls") {
  SimConfig cfg = quick_config();
  cfg.mm_sweep = {50};
  SimContext ctx = quick_context(cfg);
  BerCurve curve = run_sweep(ctx, cfg);
  REQUIRE(curve.points.size() == 1);
  BerPoint direct = run_ber_point(ctx, cfg, 50);
  CHECK(curve.scheme == cfg.scheme);
  CHECK(curve.config_digest == config_digest(cfg, ctx));
  CHECK(curve.points[0].frames == direct.frames);
  CHECK(curve.points[0].bit_errors == direct.bit_errors);
  CHECK(curve.points[0].frame_errors == direct.frame_errors);
}

TEST_CASE("hard threshold reports raw detection errors") {
  SimConfig cfg = quick_config();
  cfg.scheme = Scheme::hard_threshold;
  cfg.target_frame_errors = 5;
  cfg.max_frames = 50;
  SimContext ctx = quick_context(cfg);
  BerPoint pt = run_ber_point(ctx, cfg, 50);
  CHECK(pt.raw_bit_errors > 0);
  CHECK(pt.raw_ber > 0);
  CHECK(pt.raw_ber <= 1);

  cfg.threshold = 1e12;
  uint64_t raw = run_frame(ctx, cfg, 50, 0).raw_bit_errors;
  CHECK(raw > 50);
  CHECK(raw < 150);

  cfg.threshold.reset();
  cfg.scheme = Scheme::single;
  CHECK(run_frame(ctx, cfg, 50, 0).raw_bit_errors == 0);
}

TEST_CASE("digest tracks simulation inputs and ignores workers") {
  SimConfig cfg = quick_config();
  SimContext ctx = quick_context(cfg);
  std::string base = config_digest(cfg, ctx);
  CHECK(base.size() == 16);

  SimConfig other = cfg;
  other.workers = 8;
  CHECK(config_digest(other, ctx) == base);

  other = cfg;
  other.master_seed = 2;
  CHECK(config_digest(other, ctx) != base);

  other = cfg;
  other.scheme = Scheme::diversity;
  CHECK(config_digest(other, ctx) != base);

  other = cfg;
  other.mm_sweep.push_back(1e5);
  CHECK(config_digest(other, ctx) != base);

  SimContext bumped = quick_context(cfg);
  bumped.response.p[0] += 1e-9;
  CHECK(config_digest(cfg, bumped) != base);
}
