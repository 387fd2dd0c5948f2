#pragma once

#include <string>
#include <vector>

#include "mcd/harness.hpp"

namespace mcd {

// JSON configuration: top-level keys mirror SimConfig fields, with nested
// "channel" and "code" objects. Missing fields keep the built-in defaults,
// unknown keys are rejected, overrides are dotted key=value pairs applied
// on top of the file (values parsed as JSON, bare words as strings).
SimConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides = {});
SimConfig parse_config(const std::string& path,
                       const std::vector<std::string>& overrides = {});

// Canonical JSON rendering of a config, usable as a config file.
std::string config_to_json(const SimConfig& config);

// header: scheme,mm,frames,bit_errors,frame_errors,ber,fer,stopped_by
void emit_csv(const std::vector<BerCurve>& curves, const std::string& path);

// Blank-line-separated "mm ber" blocks, one per curve, gnuplot-friendly.
void emit_plotdata(const std::vector<BerCurve>& curves,
                   const std::string& path);

struct CsvRow {
  std::string scheme;
  BerPoint point;
};

std::vector<CsvRow> parse_ber_csv(const std::string& path);

// Provenance record written next to every simulation output.
struct RunManifest {
  std::string digest;
  std::string version;
  std::string timestamp;       // ISO 8601 UTC, empty means "fill at write"
  std::string channel_file;    // empty when the response was built in-memory
  std::string channel_source;  // "cached" | "simulated" | "analytic"
  std::string code_file;
  std::string code_source;     // "cached" | "generated"
  std::vector<std::string> outputs;
  std::vector<std::string> notes;
};

std::string utc_timestamp();

void write_manifest(const RunManifest& manifest,
                    const std::vector<BerCurve>& curves,
                    const std::string& path);

}  // namespace mcd
