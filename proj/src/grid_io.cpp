#include "ring_march/grid_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ring_march {

AsciiGrid render(const Configuration& config) {
  AsciiGrid grid;
  grid.time = config.time();
  grid.lines.reserve(config.track_count());
  for (int y = config.track_count() - 1; y >= 0; --y) {
    std::string line(config.ring_length(), '.');
    for (int x = 0; x < config.ring_length(); ++x) {
      const LocustId id = config.at(x, y);
      if (id != kNoLocust) line[x] = heading_glyph(config.heading(id));
    }
    grid.lines.push_back(std::move(line));
  }
  return grid;
}

Configuration parse(const AsciiGrid& grid) {
  Configuration config = parse_lines(grid.lines, grid.time);
  return config;
}

Configuration parse_lines(const std::vector<std::string>& lines,
                          std::int64_t time) {
  if (lines.empty()) throw_error(Errc::ragged_lines, "no grid lines");
  const std::size_t n = lines[0].size();
  for (const std::string& line : lines)
    if (line.size() != n)
      throw_error(Errc::ragged_lines,
                  "expected " + std::to_string(n) + " columns, got " +
                      std::to_string(line.size()));
  if (n == 0) throw_error(Errc::ragged_lines, "empty grid line");
  const int k = static_cast<int>(lines.size());
  Configuration config(static_cast<int>(n), k);
  // Ids in scan order: bottom track (last line) first, ascending x.
  for (int y = 0; y < k; ++y) {
    const std::string& line = lines[static_cast<std::size_t>(k - 1 - y)];
    for (std::size_t x = 0; x < n; ++x) {
      const char c = line[x];
      if (c == '.') continue;
      if (c != '>' && c != '<')
        throw_error(Errc::bad_glyph, std::string("glyph '") + c + "' at (" +
                                         std::to_string(x) + "," +
                                         std::to_string(y) + ")");
      config.add_locust(Coord{static_cast<int>(x), y},
                        c == '>' ? Heading::clockwise
                                 : Heading::counterclockwise);
    }
  }
  config.set_time(time);
  return config;
}

std::string to_text(const AsciiGrid& grid) {
  std::string out = "t=" + std::to_string(grid.time) + "\n";
  for (const std::string& line : grid.lines) {
    out += line;
    out += '\n';
  }
  return out;
}

AsciiGrid grid_from_text(std::string_view text) {
  AsciiGrid grid;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (!have_header) {
      if (line.substr(0, 2) != "t=")
        throw_error(Errc::ragged_lines, "missing t= header");
      grid.time = std::stoll(std::string(line.substr(2)));
      have_header = true;
    } else {
      grid.lines.emplace_back(line);
    }
  }
  if (!have_header || grid.lines.empty())
    throw_error(Errc::ragged_lines, "incomplete grid block");
  return grid;
}

std::string render_text(const Configuration& config) {
  return to_text(render(config));
}

std::vector<AsciiGrid> parse_trace(std::string_view text) {
  std::vector<AsciiGrid> out;
  std::size_t pos = 0;
  std::string block;
  auto flush = [&] {
    if (!block.empty()) {
      out.push_back(grid_from_text(block));
      block.clear();
    }
  };
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    if (line.empty())
      flush();
    else {
      block += line;
      block += '\n';
    }
    pos = end + 1;
  }
  flush();
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(Errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(Errc::io_error, "cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw_error(Errc::io_error, "short write to " + path);
}

namespace {

using nlohmann::json;

void reject_unknown(const json& object, std::initializer_list<const char*> keys,
                    const char* where) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* k : keys)
      if (key == k) known = true;
    if (!known)
      throw_error(Errc::bad_config,
                  std::string("unknown key \"") + key + "\" in " + where);
  }
}

double probability_field(const json& object, const char* key, double fallback) {
  if (!object.contains(key)) return fallback;
  if (!object[key].is_number())
    throw_error(Errc::bad_config, std::string(key) + " must be a number");
  const double v = object[key].get<double>();
  if (v < 0.0 || v > 1.0)
    throw_error(Errc::bad_config,
                std::string(key) + " must lie in [0,1], got " +
                    std::to_string(v));
  return v;
}

}  // namespace

ExperimentSpec load_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw_error(Errc::bad_config, std::string("invalid JSON: ") + err.what());
  }
  if (!root.is_object()) throw_error(Errc::bad_config, "top level must be an object");
  reject_unknown(root, {"n", "k", "init", "params", "mode", "trials", "seed",
                        "max_steps"},
                 "run config");
  for (const char* required : {"n", "k", "init", "mode", "trials", "seed"})
    if (!root.contains(required))
      throw_error(Errc::bad_config, std::string("missing key \"") + required + "\"");

  ExperimentSpec spec;
  spec.n = root["n"].get<int>();
  spec.k = root["k"].get<int>();
  spec.trials = root["trials"].get<int>();
  spec.base_seed = root["seed"].get<std::uint64_t>();
  spec.max_steps = root.value("max_steps", std::int64_t{1'000'000});
  const std::string mode = root["mode"].get<std::string>();
  if (mode == "local")
    spec.mode = StabilityMode::local;
  else if (mode == "global")
    spec.mode = StabilityMode::global;
  else
    throw_error(Errc::bad_config, "mode must be \"local\" or \"global\"");

  const json& init = root["init"];
  reject_unknown(init, {"type", "density", "m", "grid"}, "init");
  const std::string type = init.at("type").get<std::string>();
  if (type == "dense") {
    spec.init = InitSpec::dense();
    spec.init.density = probability_field(init, "density", 0.5);
  } else if (type == "sparse") {
    spec.init = InitSpec::sparse();
    spec.init.density = probability_field(init, "density", 0.1);
  } else if (type == "two_segment") {
    if (!init.contains("m"))
      throw_error(Errc::bad_config, "two_segment init needs \"m\"");
    spec.init = InitSpec::two_segment(init["m"].get<int>());
  } else if (type == "explicit") {
    if (!init.contains("grid") || !init["grid"].is_array())
      throw_error(Errc::bad_config, "explicit init needs a \"grid\" line array");
    std::vector<std::string> lines;
    for (const json& line : init["grid"]) lines.push_back(line.get<std::string>());
    Configuration config = parse_lines(lines);
    if (config.ring_length() != spec.n || config.track_count() != spec.k)
      throw_error(Errc::bad_config, "grid shape disagrees with n and k");
    spec.init = InitSpec::explicit_config(std::move(config));
  } else {
    throw_error(Errc::bad_config, "init type \"" + type + "\" unknown");
  }

  if (root.contains("params")) {
    const json& params = root["params"];
    reject_unknown(params, {"r", "p", "policy", "guard"}, "params");
    spec.params.rest_probability = probability_field(params, "r", 0.0);
    spec.params.erratic_probability = probability_field(params, "p", 0.0);
    if (params.contains("guard"))
      spec.params.guard_min_two_per_track = params["guard"].get<bool>();
    if (params.contains("policy")) {
      const json& policy = params["policy"];
      reject_unknown(policy, {"type", "q"}, "policy");
      const std::string ptype = policy.at("type").get<std::string>();
      if (ptype == "never") {
        spec.params.policy = SwitchPolicy::never();
      } else if (ptype == "eager") {
        spec.params.policy = SwitchPolicy::eager();
      } else if (ptype == "probabilistic") {
        if (!policy.contains("q"))
          throw_error(Errc::bad_config, "probabilistic policy needs \"q\"");
        spec.params.policy =
            SwitchPolicy::probabilistic(probability_field(policy, "q", 0.0));
      } else {
        throw_error(Errc::bad_config, "policy type \"" + ptype + "\" unknown");
      }
      if (ptype != "probabilistic" && policy.contains("q"))
        throw_error(Errc::bad_config, "q is only valid for probabilistic policy");
    }
  }
  if (spec.trials < 1) throw_error(Errc::bad_config, "trials must be >= 1");
  return spec;
}

ExperimentSpec load_run_config_file(const std::string& path) {
  return load_run_config(read_file(path));
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  std::string s(buf);
  if (s.find_first_of(".einf") == std::string::npos) s += ".0";
  return s;
}

std::string csv_text(const std::vector<SweepRow>& rows) {
  std::string out =
      "sweep,point,n,k,m,density,policy,q,p,r,mode,trials,seed,"
      "mean_t_stable,stderr,timeouts\n";
  for (const SweepRow& row : rows) {
    out += row.sweep;
    out += ',' + format_double(row.point);
    out += ',' + std::to_string(row.n);
    out += ',' + std::to_string(row.k);
    out += ',' + std::to_string(row.m);
    out += ',' + row.density;
    out += ',' + row.policy;
    out += ',';
    if (row.q) out += format_double(*row.q);
    out += ',' + format_double(row.p);
    out += ',' + format_double(row.r);
    out += ',' + row.mode;
    out += ',' + std::to_string(row.trials);
    out += ',' + std::to_string(row.seed);
    out += ',';
    if (row.mean_t_stable) out += format_double(*row.mean_t_stable);
    out += ',';
    if (row.stderr_t_stable) out += format_double(*row.stderr_t_stable);
    out += ',' + std::to_string(row.timeouts);
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  write_file(path, csv_text(rows));
}

}  // namespace ring_march
