#include "mcd/sim_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcd/errors.hpp"
#include "mcd/version.hpp"

namespace mcd {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out << text;
  if (!out) throw io_error("write failed for " + path);
}

void reject_unknown(const json& obj, const char* scope,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) {
      throw validation_error(std::string("unknown config key ") + scope +
                             item.key());
    }
  }
}

template <typename T>
void load_field(const json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw validation_error(std::string("config field '") + key +
                           "' has the wrong type");
  }
}

template <typename T>
void load_optional(const json& obj, const char* key, std::optional<T>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (it->is_null()) {
    out.reset();
    return;
  }
  T value;
  load_field(obj, key, value);
  out = value;
}

SimConfig config_from_json(const json& root) {
  if (!root.is_object()) {
    throw validation_error("config root must be a JSON object");
  }
  reject_unknown(root, "",
                 {"scheme", "channel", "code", "memory_duration", "mm_sweep",
                  "max_iter", "target_frame_errors", "max_frames",
                  "master_seed", "beta", "threshold", "hypothesis_bits",
                  "workers"});
  SimConfig cfg;
  if (auto it = root.find("scheme"); it != root.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw validation_error("config field 'scheme' must be a string");
    }
    cfg.scheme = parse_scheme(it->get<std::string>());
  }
  if (auto it = root.find("channel"); it != root.end() && !it->is_null()) {
    const json& ch = *it;
    if (!ch.is_object()) {
      throw validation_error("config field 'channel' must be an object");
    }
    reject_unknown(ch, "channel.",
                   {"total_time", "diffusion_coeff", "tx_distance",
                    "receiver_radius", "n_particles", "sim_step",
                    "slot_width"});
    load_field(ch, "total_time", cfg.channel.total_time);
    load_field(ch, "diffusion_coeff", cfg.channel.diffusion_coeff);
    load_field(ch, "tx_distance", cfg.channel.tx_distance);
    load_field(ch, "receiver_radius", cfg.channel.receiver_radius);
    load_field(ch, "n_particles", cfg.channel.n_particles);
    load_field(ch, "sim_step", cfg.channel.sim_step);
    load_field(ch, "slot_width", cfg.channel.slot_width);
  }
  if (auto it = root.find("code"); it != root.end() && !it->is_null()) {
    const json& code = *it;
    if (!code.is_object()) {
      throw validation_error("config field 'code' must be an object");
    }
    reject_unknown(code, "code.", {"n", "k", "seed"});
    load_field(code, "n", cfg.code_n);
    load_field(code, "k", cfg.code_k);
    load_field(code, "seed", cfg.code_seed);
  }
  load_field(root, "memory_duration", cfg.memory_duration);
  load_field(root, "mm_sweep", cfg.mm_sweep);
  load_field(root, "max_iter", cfg.max_iter);
  load_field(root, "target_frame_errors", cfg.target_frame_errors);
  load_field(root, "max_frames", cfg.max_frames);
  load_field(root, "master_seed", cfg.master_seed);
  load_optional(root, "beta", cfg.beta);
  load_optional(root, "threshold", cfg.threshold);
  load_optional(root, "hypothesis_bits", cfg.hypothesis_bits);
  load_field(root, "workers", cfg.workers);
  validate(cfg);
  return cfg;
}

void apply_override(json& root, const std::string& entry) {
  size_t eq = entry.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw validation_error("override must look like key=value: " + entry);
  }
  std::string key = entry.substr(0, eq);
  std::string value = entry.substr(eq + 1);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &root;
  size_t start = 0;
  for (size_t dot = key.find('.'); dot != std::string::npos;
       dot = key.find('.', start)) {
    node = &(*node)[key.substr(start, dot - start)];
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) {
      throw validation_error("override path crosses a non-object: " + key);
    }
    start = dot + 1;
  }
  (*node)[key.substr(start)] = parsed;
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(origin + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

SimConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides) {
  json root = text.empty() ? json::object() : parse_json_text(text, "config");
  for (const std::string& entry : overrides) apply_override(root, entry);
  return config_from_json(root);
}

SimConfig parse_config(const std::string& path,
                       const std::vector<std::string>& overrides) {
  json root =
      path.empty() ? json::object() : parse_json_text(read_file(path), path);
  for (const std::string& entry : overrides) apply_override(root, entry);
  return config_from_json(root);
}

std::string config_to_json(const SimConfig& config) {
  json root;
  root["scheme"] = scheme_name(config.scheme);
  root["channel"] = {{"total_time", config.channel.total_time},
                     {"diffusion_coeff", config.channel.diffusion_coeff},
                     {"tx_distance", config.channel.tx_distance},
                     {"receiver_radius", config.channel.receiver_radius},
                     {"n_particles", config.channel.n_particles},
                     {"sim_step", config.channel.sim_step},
                     {"slot_width", config.channel.slot_width}};
  root["code"] = {{"n", config.code_n},
                  {"k", config.code_k},
                  {"seed", config.code_seed}};
  root["memory_duration"] = config.memory_duration;
  root["mm_sweep"] = config.mm_sweep;
  root["max_iter"] = config.max_iter;
  root["target_frame_errors"] = config.target_frame_errors;
  root["max_frames"] = config.max_frames;
  root["master_seed"] = config.master_seed;
  root["beta"] = config.beta ? json(*config.beta) : json(nullptr);
  root["threshold"] = config.threshold ? json(*config.threshold) : json(nullptr);
  root["hypothesis_bits"] =
      config.hypothesis_bits ? json(*config.hypothesis_bits) : json(nullptr);
  root["workers"] = config.workers;
  return root.dump(2) + "\n";
}

void emit_csv(const std::vector<BerCurve>& curves, const std::string& path) {
  if (curves.empty()) throw validation_error("no curves to write");
  std::string out = "scheme,mm,frames,bit_errors,frame_errors,ber,fer,stopped_by\n";
  for (const BerCurve& curve : curves) {
    for (const BerPoint& pt : curve.points) {
      char line[256];
      std::snprintf(line, sizeof line,
                    "%s,%s,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%s,%s,%s\n",
                    scheme_name(curve.scheme), format_double(pt.mm).c_str(),
                    pt.frames, pt.bit_errors, pt.frame_errors,
                    format_double(pt.ber).c_str(),
                    format_double(pt.fer).c_str(),
                    stopped_by_name(pt.stopped_by));
      out += line;
    }
  }
  write_file(path, out);
}

void emit_plotdata(const std::vector<BerCurve>& curves,
                   const std::string& path) {
  if (curves.empty()) throw validation_error("no curves to write");
  std::string out =
      "# molecule budget (mm) vs bit error rate; log-log scale recommended\n";
  bool first = true;
  for (const BerCurve& curve : curves) {
    if (!first) out += "\n";
    first = false;
    out += std::string("# scheme: ") + scheme_name(curve.scheme) + "\n";
    for (const BerPoint& pt : curve.points) {
      out += format_double(pt.mm) + " " + format_double(pt.ber) + "\n";
    }
  }
  write_file(path, out);
}

std::vector<CsvRow> parse_ber_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) ||
      line != "scheme,mm,frames,bit_errors,frame_errors,ber,fer,stopped_by") {
    throw validation_error(path + ": missing or wrong CSV header");
  }
  std::vector<CsvRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream split(line);
    std::string field;
    while (std::getline(split, field, ',')) fields.push_back(field);
    if (fields.size() != 8) {
      throw validation_error(path + ": line " + std::to_string(lineno) +
                             " does not have 8 fields");
    }
    CsvRow row;
    row.scheme = fields[0];
    try {
      row.point.mm = std::stod(fields[1]);
      row.point.frames = std::stoull(fields[2]);
      row.point.bit_errors = std::stoull(fields[3]);
      row.point.frame_errors = std::stoull(fields[4]);
      row.point.ber = std::stod(fields[5]);
      row.point.fer = std::stod(fields[6]);
    } catch (const std::exception&) {
      throw validation_error(path + ": line " + std::to_string(lineno) +
                             " has a malformed number");
    }
    if (fields[7] == "frame_errors") {
      row.point.stopped_by = StoppedBy::frame_errors;
    } else if (fields[7] == "max_frames") {
      row.point.stopped_by = StoppedBy::max_frames;
    } else {
      throw validation_error(path + ": line " + std::to_string(lineno) +
                             " has an unknown stop reason");
    }
    rows.push_back(row);
  }
  return rows;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const RunManifest& manifest,
                    const std::vector<BerCurve>& curves,
                    const std::string& path) {
  json root;
  root["digest"] = manifest.digest;
  root["version"] = manifest.version.empty() ? kVersion : manifest.version;
  root["timestamp"] =
      manifest.timestamp.empty() ? utc_timestamp() : manifest.timestamp;
  root["channel"] = {{"file", manifest.channel_file},
                     {"source", manifest.channel_source}};
  root["code"] = {{"file", manifest.code_file},
                  {"source", manifest.code_source}};
  root["outputs"] = manifest.outputs;
  root["notes"] = manifest.notes;
  json curve_list = json::array();
  for (const BerCurve& curve : curves) {
    json points = json::array();
    for (const BerPoint& pt : curve.points) {
      json p = {{"mm", pt.mm},
                {"frames", pt.frames},
                {"bit_errors", pt.bit_errors},
                {"frame_errors", pt.frame_errors},
                {"ber", pt.ber},
                {"fer", pt.fer},
                {"stopped_by", stopped_by_name(pt.stopped_by)}};
      if (curve.scheme == Scheme::hard_threshold) {
        p["raw_bit_errors"] = pt.raw_bit_errors;
        p["raw_ber"] = pt.raw_ber;
      }
      points.push_back(p);
    }
    curve_list.push_back({{"scheme", scheme_name(curve.scheme)},
                          {"digest", curve.config_digest},
                          {"points", points}});
  }
  root["curves"] = curve_list;
  write_file(path, root.dump(2) + "\n");
}

}  // namespace mcd
