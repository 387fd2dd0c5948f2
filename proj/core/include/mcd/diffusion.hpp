#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mcd {

// Physics of the point-transmitter / absorbing-sphere link.
// Units: seconds, micrometers, um^2/s.
struct ChannelParams {
  double total_time = 2.1;        // simulated horizon T
  double diffusion_coeff = 79.4;  // D
  double tx_distance = 10.0;      // transmitter to receiver center, r0
  double receiver_radius = 5.0;   // rr
  uint64_t n_particles = 1000000;
  double sim_step = 1e-4;         // random-walk step dt
  double slot_width = 0.15;       // symbol slot Ts
};

// Throws validation_error naming the offending field.
void validate(const ChannelParams& params);

// Number of symbol slots T / Ts.
int slot_count(const ChannelParams& params);

// Per-slot hit probabilities P1..Pm and the ISI depth used downstream.
struct ChannelResponse {
  std::vector<double> p;
  double slot_width = 0.15;
  int memory = 1;  // ISI taps L, 1 <= L <= p.size() - 1
};

void validate(const ChannelResponse& response);

// round(duration / slot_width), clamped to the valid tap range.
int default_memory_taps(double slot_width, double memory_duration, int slots);

// First-passage CDF for a point source at distance r0 from the center of a
// perfectly absorbing sphere of radius rr:
//   F(t) = (rr/r0) * erfc((r0 - rr) / (2*sqrt(D*t)))
// Used both as runtime fast path and as the oracle for the particle walk.
double analytical_hitting_cdf(const ChannelParams& params, double t);

// Per-slot increments of a cumulative hit curve sampled at slot boundaries.
std::vector<double> cumulative_to_slots(const std::vector<double>& cdf_values);

ChannelResponse analytic_channel_response(const ChannelParams& params,
                                          double memory_duration = 1.4);

// Absorption test applied to each random-walk step. end_of_step only looks at
// the step's final position and undercounts first passages by a boundary
// layer of order sqrt(2*D*dt); bridge adds the exact flat-barrier crossing
// probability for the step and matches the analytical CDF.
enum class Absorption { bridge, end_of_step };

// Brownian-motion particle walk. Each particle's randomness is keyed by
// (seed, particle index), so the result is bitwise identical for any worker
// count. workers <= 0 picks hardware concurrency.
ChannelResponse simulate_channel_response(const ChannelParams& params,
                                          uint64_t seed, int workers = 1,
                                          Absorption rule = Absorption::bridge,
                                          double memory_duration = 1.4);

// Plain-text P-vector cache: "Ts=", "N=", then one "P<l>=" line per slot.
void write_channel_file(const ChannelResponse& response, uint64_t n_particles,
                        const std::string& path);
ChannelResponse read_channel_file(const std::string& path,
                                  double memory_duration = 1.4,
                                  uint64_t* n_particles = nullptr);

}  // namespace mcd
