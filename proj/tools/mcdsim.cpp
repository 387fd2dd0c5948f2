#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcd/diffusion.hpp"
#include "mcd/errors.hpp"
#include "mcd/harness.hpp"
#include "mcd/ldpc.hpp"
#include "mcd/rng.hpp"
#include "mcd/sim_io.hpp"
#include "mcd/version.hpp"

namespace {

namespace fs = std::filesystem;

struct Args {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string channel_file;
  std::string code_file;
  std::string out;
  bool analytic_channel = false;
  std::optional<uint64_t> seed;
  std::optional<int> workers;
};

void add_config_flags(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--set", args.overrides,
                  "config override key=value, dotted paths allowed");
  cmd->add_option("--seed", args.seed, "override master_seed");
  cmd->add_option("--workers", args.workers,
                  "worker threads (never changes results)");
}

mcd::SimConfig load_config(const Args& args) {
  mcd::SimConfig config =
      args.config_path.empty()
          ? mcd::parse_config_text("{}", args.overrides)
          : mcd::parse_config(args.config_path, args.overrides);
  if (args.seed) config.master_seed = *args.seed;
  if (args.workers) config.workers = *args.workers;
  mcd::validate(config);
  return config;
}

mcd::ChannelResponse build_response(const mcd::SimConfig& config,
                                    bool analytic) {
  if (analytic) {
    return mcd::analytic_channel_response(config.channel,
                                          config.memory_duration);
  }
  uint64_t seed =
      mcd::derive_seed(config.master_seed, mcd::seed_tag::diffusion);
  return mcd::simulate_channel_response(config.channel, seed, config.workers,
                                        mcd::Absorption::bridge,
                                        config.memory_duration);
}

// Load-if-present, else build and (when a path was given) save.
mcd::ChannelResponse resolve_channel(const mcd::SimConfig& config,
                                     const Args& args,
                                     mcd::RunManifest& manifest) {
  if (!args.channel_file.empty() && fs::exists(args.channel_file)) {
    mcd::ChannelResponse response =
        mcd::read_channel_file(args.channel_file, config.memory_duration);
    if (response.slot_width != config.channel.slot_width) {
      throw mcd::validation_error(
          "channel file slot width does not match config slot_width");
    }
    manifest.channel_file = args.channel_file;
    manifest.channel_source = "cached";
    return response;
  }
  mcd::ChannelResponse response = build_response(config, args.analytic_channel);
  manifest.channel_source = args.analytic_channel ? "analytic" : "simulated";
  if (!args.channel_file.empty()) {
    uint64_t particles = args.analytic_channel ? 0 : config.channel.n_particles;
    mcd::write_channel_file(response, particles, args.channel_file);
    manifest.channel_file = args.channel_file;
  } else {
    manifest.channel_file = "(not cached)";
  }
  return response;
}

mcd::SimContext resolve_context(const mcd::SimConfig& config,
                                mcd::ChannelResponse response,
                                const Args& args,
                                mcd::RunManifest& manifest) {
  if (!args.code_file.empty() && fs::exists(args.code_file)) {
    mcd::LdpcCode code = mcd::read_alist(args.code_file);
    if (code.n != config.code_n || code.k != config.code_k) {
      throw mcd::validation_error("code file is (" + std::to_string(code.n) +
                                  "," + std::to_string(code.k) +
                                  "), config wants (" +
                                  std::to_string(config.code_n) + "," +
                                  std::to_string(config.code_k) + ")");
    }
    manifest.code_file = args.code_file;
    manifest.code_source = "cached";
    return mcd::make_context(config, std::move(response), std::move(code));
  }
  mcd::SimContext context = mcd::make_context(config, std::move(response));
  manifest.code_source = "generated";
  if (!args.code_file.empty()) {
    mcd::write_alist(context.code, args.code_file);
    manifest.code_file = args.code_file;
  } else {
    manifest.code_file = "(not cached)";
  }
  return context;
}

void print_point(mcd::Scheme scheme, const mcd::BerPoint& pt) {
  std::printf("%-13s mm=%-12.6g frames=%-8llu ber=%-12.6g fer=%-12.6g %s\n",
              mcd::scheme_name(scheme), pt.mm,
              static_cast<unsigned long long>(pt.frames), pt.ber, pt.fer,
              mcd::stopped_by_name(pt.stopped_by));
  std::fflush(stdout);
}

mcd::BerCurve run_curve(const mcd::SimContext& context,
                        const mcd::SimConfig& config) {
  mcd::BerCurve curve;
  curve.scheme = config.scheme;
  curve.config_digest = mcd::config_digest(config, context);
  for (double mm : config.mm_sweep) {
    curve.points.push_back(mcd::run_ber_point(context, config, mm));
    print_point(config.scheme, curve.points.back());
  }
  return curve;
}

void add_scheme_notes(mcd::Scheme scheme, std::vector<std::string>& notes) {
  if (scheme == mcd::Scheme::preequalized) {
    notes.push_back(
        "preequalized is a simplified baseline: the transmitter adds a "
        "beta-weighted anti-molecule copy of the previous slot (beta defaults "
        "to 1) and the receiver subtracts type B counts, detecting with "
        "statistics matched to the subtracted stream");
  }
  if (scheme == mcd::Scheme::hard_threshold) {
    notes.push_back(
        "hard_threshold feeds threshold decisions to the decoder as "
        "saturated log-likelihood ratios; raw pre-decoder bit errors are "
        "recorded per point");
  }
}

void write_outputs(const mcd::SimConfig& config,
                   const std::vector<mcd::BerCurve>& curves, const Args& args,
                   mcd::RunManifest manifest) {
  fs::path dir = args.out.empty() ? fs::path("out") : fs::path(args.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw mcd::io_error("cannot create " + dir.string());
  std::string csv = (dir / "ber.csv").string();
  std::string dat = (dir / "ber.dat").string();
  std::string mf = (dir / "manifest.json").string();
  mcd::emit_csv(curves, csv);
  mcd::emit_plotdata(curves, dat);
  manifest.digest = curves.front().config_digest;
  manifest.outputs = {csv, dat};
  for (const mcd::BerCurve& curve : curves) {
    add_scheme_notes(curve.scheme, manifest.notes);
  }
  if (config.workers > 1) {
    manifest.notes.push_back("results are invariant to the worker count");
  }
  mcd::write_manifest(manifest, curves, mf);
  std::printf("wrote %s, %s, %s\n", csv.c_str(), dat.c_str(), mf.c_str());
}

int cmd_channel(const Args& args) {
  mcd::SimConfig config = load_config(args);
  mcd::ChannelResponse response =
      build_response(config, args.analytic_channel);
  std::string out = args.out.empty() ? "channel.txt" : args.out;
  uint64_t particles = args.analytic_channel ? 0 : config.channel.n_particles;
  mcd::write_channel_file(response, particles, out);
  std::printf("wrote %s: %zu slots, Ts=%g s, memory=%d taps, P1=%.6g (%s)\n",
              out.c_str(), response.p.size(), response.slot_width,
              response.memory, response.p.empty() ? 0.0 : response.p[0],
              args.analytic_channel ? "analytic" : "simulated");
  return 0;
}

int cmd_code(const Args& args) {
  mcd::SimConfig config = load_config(args);
  mcd::LdpcCode code =
      mcd::build_regular_code(config.code_n, config.code_k, config.code_seed);
  std::string out = args.out.empty() ? "code.alist" : args.out;
  mcd::write_alist(code, out);
  std::printf("wrote %s: (%d,%d) code, seed=%llu, 4-cycles=%d\n", out.c_str(),
              code.n, code.k, static_cast<unsigned long long>(code.seed),
              code.four_cycle_count);
  return 0;
}

int cmd_run(const Args& args) {
  mcd::SimConfig config = load_config(args);
  mcd::RunManifest manifest;
  mcd::ChannelResponse response = resolve_channel(config, args, manifest);
  mcd::SimContext context =
      resolve_context(config, std::move(response), args, manifest);
  std::vector<mcd::BerCurve> curves = {run_curve(context, config)};
  write_outputs(config, curves, args, std::move(manifest));
  return 0;
}

int cmd_compare(const Args& args) {
  mcd::SimConfig config = load_config(args);
  mcd::RunManifest manifest;
  mcd::ChannelResponse response = resolve_channel(config, args, manifest);
  mcd::SimContext context =
      resolve_context(config, std::move(response), args, manifest);
  std::vector<mcd::BerCurve> curves;
  for (mcd::Scheme scheme : {mcd::Scheme::single, mcd::Scheme::diversity,
                             mcd::Scheme::preequalized}) {
    mcd::SimConfig variant = config;
    variant.scheme = scheme;
    variant.threshold.reset();
    if (scheme != mcd::Scheme::preequalized) variant.beta.reset();
    mcd::validate(variant);
    curves.push_back(run_curve(context, variant));
  }
  write_outputs(config, curves, args, std::move(manifest));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo link simulator for diffusive molecular channels"};
  app.set_version_flag("--version", mcd::kVersion);
  app.require_subcommand(1);
  Args args;

  CLI::App* channel =
      app.add_subcommand("channel", "build and cache a channel response");
  add_config_flags(channel, args);
  channel->add_option("--out", args.out, "output file (default channel.txt)");
  channel->add_flag("--analytic-channel", args.analytic_channel,
                    "closed-form hitting curve instead of a particle walk");

  CLI::App* code =
      app.add_subcommand("code", "build and cache a parity-check code");
  add_config_flags(code, args);
  code->add_option("--out", args.out, "output file (default code.alist)");

  CLI::App* run = app.add_subcommand("run", "run one scheme over the sweep");
  CLI::App* compare = app.add_subcommand(
      "compare", "run single, diversity and preequalized over the sweep");
  for (CLI::App* cmd : {run, compare}) {
    add_config_flags(cmd, args);
    cmd->add_option("--channel-file", args.channel_file,
                    "channel cache: read if present, else write");
    cmd->add_option("--code-file", args.code_file,
                    "code cache: read if present, else write");
    cmd->add_option("--out", args.out, "output directory (default out)");
    cmd->add_flag("--analytic-channel", args.analytic_channel,
                  "closed-form hitting curve instead of a particle walk");
  }

  try {
    app.parse(argc, argv);
    if (channel->parsed()) return cmd_channel(args);
    if (code->parsed()) return cmd_code(args);
    if (run->parsed()) return cmd_run(args);
    return cmd_compare(args);
  } catch (const CLI::ParseError& e) {
    int code_ = app.exit(e);
    return code_ == 0 ? 0 : 2;
  } catch (const mcd::validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mcd::io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const mcd::construction_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
