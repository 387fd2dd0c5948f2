#include "mcd/diffusion.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "mcd/errors.hpp"
#include "mcd/rng.hpp"

namespace mcd {
namespace {

bool near_integer_ratio(double num, double den, long long* out) {
  double ratio = num / den;
  long long r = llround(ratio);
  if (r < 1) return false;
  if (std::fabs(ratio - double(r)) > 1e-6 * ratio) return false;
  *out = r;
  return true;
}

void require(bool ok, const char* what) {
  if (!ok) throw validation_error(what);
}

}  // namespace

void validate(const ChannelParams& params) {
  require(std::isfinite(params.total_time) && params.total_time > 0,
          "total_time must be positive");
  require(std::isfinite(params.diffusion_coeff) && params.diffusion_coeff >= 0,
          "diffusion_coeff must be nonnegative");
  require(std::isfinite(params.receiver_radius) && params.receiver_radius > 0,
          "receiver_radius must be positive");
  require(std::isfinite(params.tx_distance) &&
              params.tx_distance > params.receiver_radius,
          "tx_distance must exceed receiver_radius");
  require(std::isfinite(params.sim_step) && params.sim_step > 0,
          "sim_step must be positive");
  require(std::isfinite(params.slot_width) && params.slot_width > 0,
          "slot_width must be positive");
  long long steps_per_slot = 0;
  require(near_integer_ratio(params.slot_width, params.sim_step,
                             &steps_per_slot),
          "slot_width must be an integer multiple of sim_step");
  long long slots = 0;
  require(near_integer_ratio(params.total_time, params.slot_width, &slots),
          "total_time must be an integer multiple of slot_width");
  require(slots >= 2, "total_time must span at least two slots");
}

int slot_count(const ChannelParams& params) {
  validate(params);
  return int(llround(params.total_time / params.slot_width));
}

void validate(const ChannelResponse& response) {
  require(response.p.size() >= 2, "channel response needs at least two slots");
  require(std::isfinite(response.slot_width) && response.slot_width > 0,
          "slot_width must be positive");
  double sum = 0;
  for (double v : response.p) {
    require(std::isfinite(v) && v >= 0 && v <= 1,
            "slot probabilities must lie in [0, 1]");
    sum += v;
  }
  require(sum <= 1.0 + 1e-9, "slot probabilities must sum to at most 1");
  require(response.memory >= 1 &&
              response.memory <= int(response.p.size()) - 1,
          "memory must lie in [1, slots - 1]");
}

int default_memory_taps(double slot_width, double memory_duration, int slots) {
  require(std::isfinite(memory_duration) && memory_duration > 0,
          "memory_duration must be positive");
  require(slots >= 2, "need at least two slots");
  long long taps = llround(memory_duration / slot_width);
  if (taps < 1) taps = 1;
  if (taps > slots - 1) taps = slots - 1;
  return int(taps);
}

double analytical_hitting_cdf(const ChannelParams& params, double t) {
  validate(params);
  require(std::isfinite(t) && t >= 0, "time must be nonnegative");
  if (t == 0 || params.diffusion_coeff == 0) return 0;
  double gap = params.tx_distance - params.receiver_radius;
  double scale = params.receiver_radius / params.tx_distance;
  return scale * std::erfc(gap / (2 * std::sqrt(params.diffusion_coeff * t)));
}

std::vector<double> cumulative_to_slots(const std::vector<double>& cdf_values) {
  require(cdf_values.size() >= 2, "need at least two cumulative samples");
  std::vector<double> slots(cdf_values.size());
  double prev = 0;
  for (size_t i = 0; i < cdf_values.size(); ++i) {
    double cur = cdf_values[i];
    require(std::isfinite(cur) && cur >= 0 && cur <= 1,
            "cumulative values must lie in [0, 1]");
    require(cur >= prev, "cumulative values must be nondecreasing");
    slots[i] = cur - prev;
    prev = cur;
  }
  return slots;
}

ChannelResponse analytic_channel_response(const ChannelParams& params,
                                          double memory_duration) {
  int slots = slot_count(params);
  std::vector<double> cdf(slots);
  for (int l = 0; l < slots; ++l) {
    cdf[l] = analytical_hitting_cdf(params, params.slot_width * (l + 1));
  }
  ChannelResponse response;
  response.p = cumulative_to_slots(cdf);
  response.slot_width = params.slot_width;
  response.memory =
      default_memory_taps(params.slot_width, memory_duration, slots);
  validate(response);
  return response;
}

namespace {

// Distance beyond which the one-step barrier-crossing probability is far
// below 1e-19 for any step size used here; also the d_prev sentinel.
constexpr double kBridgeShell = 1.4;

template <bool kBridge>
void walk_particles(const ChannelParams& params, uint64_t seed,
                    uint64_t first, uint64_t last, long long steps_per_slot,
                    std::vector<uint64_t>& hits) {
  const double step_sigma =
      std::sqrt(2 * params.diffusion_coeff * params.sim_step);
  const double rr2 = params.receiver_radius * params.receiver_radius;
  const double shell = params.receiver_radius + kBridgeShell;
  const double shell2 = shell * shell;
  const double ddt = params.diffusion_coeff * params.sim_step;
  const double inv_ddt = 1 / ddt;
  const double q_cutoff = 45 * ddt;
  const uint64_t total_steps =
      uint64_t(steps_per_slot) * uint64_t(hits.size());

  for (uint64_t i = first; i < last; ++i) {
    Xoshiro256pp rng(derive_seed(seed, seed_tag::diffusion, i));
    double x = 0, y = 0, z = params.tx_distance;
    double d_prev = kBridgeShell;
    for (uint64_t s = 1; s <= total_steps; ++s) {
      x += step_sigma * normal(rng);
      y += step_sigma * normal(rng);
      z += step_sigma * normal(rng);
      double r2 = x * x + y * y + z * z;
      if (r2 <= rr2) {
        ++hits[size_t((s - 1) / uint64_t(steps_per_slot))];
        break;
      }
      if constexpr (kBridge) {
        if (r2 < shell2) {
          double d = std::sqrt(r2) - params.receiver_radius;
          double q = d_prev * d;
          if (q < q_cutoff && rng.uniform() < std::exp(-q * inv_ddt)) {
            ++hits[size_t((s - 1) / uint64_t(steps_per_slot))];
            break;
          }
          d_prev = d;
        } else {
          d_prev = kBridgeShell;
        }
      }
    }
  }
}

}  // namespace

ChannelResponse simulate_channel_response(const ChannelParams& params,
                                          uint64_t seed, int workers,
                                          Absorption rule,
                                          double memory_duration) {
  int slots = slot_count(params);
  require(params.n_particles >= 1, "n_particles must be positive");
  ChannelResponse response;
  response.slot_width = params.slot_width;
  response.memory =
      default_memory_taps(params.slot_width, memory_duration, slots);
  if (params.diffusion_coeff == 0) {
    response.p.assign(size_t(slots), 0.0);
    validate(response);
    return response;
  }

  long long steps_per_slot = llround(params.slot_width / params.sim_step);
  if (workers <= 0) {
    workers = int(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }
  uint64_t n = params.n_particles;
  if (uint64_t(workers) > n) workers = int(n);

  std::vector<std::vector<uint64_t>> tallies(
      size_t(workers), std::vector<uint64_t>(size_t(slots), 0));
  auto run_range = [&](int w, uint64_t first, uint64_t last) {
    if (rule == Absorption::bridge) {
      walk_particles<true>(params, seed, first, last, steps_per_slot,
                           tallies[size_t(w)]);
    } else {
      walk_particles<false>(params, seed, first, last, steps_per_slot,
                            tallies[size_t(w)]);
    }
  };

  if (workers == 1) {
    run_range(0, 0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) {
      uint64_t first = n * uint64_t(w) / uint64_t(workers);
      uint64_t last = n * uint64_t(w + 1) / uint64_t(workers);
      pool.emplace_back(run_range, w, first, last);
    }
    for (auto& t : pool) t.join();
  }

  response.p.assign(size_t(slots), 0.0);
  for (int w = 0; w < workers; ++w) {
    for (int l = 0; l < slots; ++l) {
      response.p[size_t(l)] += double(tallies[size_t(w)][size_t(l)]);
    }
  }
  for (double& v : response.p) v /= double(n);
  validate(response);
  return response;
}

void write_channel_file(const ChannelResponse& response, uint64_t n_particles,
                        const std::string& path) {
  validate(response);
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  char buf[64];
  snprintf(buf, sizeof(buf), "%.17g", response.slot_width);
  out << "Ts=" << buf << "\n";
  out << "N=" << n_particles << "\n";
  for (size_t l = 0; l < response.p.size(); ++l) {
    snprintf(buf, sizeof(buf), "%.17g", response.p[l]);
    out << "P" << (l + 1) << "=" << buf << "\n";
  }
  if (!out) throw io_error("write failed: " + path);
}

ChannelResponse read_channel_file(const std::string& path,
                                  double memory_duration,
                                  uint64_t* n_particles) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  ChannelResponse response;
  response.slot_width = 0;
  uint64_t n = 0;
  bool saw_ts = false, saw_n = false;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw io_error(path + ":" + std::to_string(line_no) +
                     ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    std::istringstream vs(value);
    if (key == "Ts") {
      saw_ts = vs >> response.slot_width && response.slot_width > 0;
      if (!saw_ts) throw io_error(path + ": bad Ts value");
    } else if (key == "N") {
      saw_n = bool(vs >> n);
      if (!saw_n) throw io_error(path + ": bad N value");
    } else if (key.size() > 1 && key[0] == 'P') {
      size_t idx = 0;
      try {
        idx = std::stoul(key.substr(1));
      } catch (const std::exception&) {
        throw io_error(path + ": bad slot key " + key);
      }
      if (idx != response.p.size() + 1) {
        throw io_error(path + ": slot keys must be P1, P2, ... in order");
      }
      double v;
      if (!(vs >> v)) throw io_error(path + ": bad value for " + key);
      response.p.push_back(v);
    } else {
      throw io_error(path + ": unknown key " + key);
    }
  }
  if (!saw_ts || !saw_n) throw io_error(path + ": missing Ts or N");
  response.memory = default_memory_taps(response.slot_width, memory_duration,
                                        int(response.p.size()));
  validate(response);
  if (n_particles) *n_particles = n;
  return response;
}

}  // namespace mcd
