#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ring_march/core.hpp"
#include "ring_march/experiments.hpp"

namespace ring_march {

// Text panel of one configuration: a "t=<step>" header and k lines of n
// glyphs over {'.', '>', '<'}. The first line is the top track (k-1), the
// last line is track 0; x grows left to right and wraps at the line edge.
struct AsciiGrid {
  std::int64_t time = 0;
  std::vector<std::string> lines;

  friend bool operator==(const AsciiGrid&, const AsciiGrid&) = default;
};

AsciiGrid render(const Configuration& config);

// Inverse of render up to locust relabeling: ids are assigned in scan order
// (bottom track up, ascending x). Throws bad_glyph / ragged_lines.
Configuration parse(const AsciiGrid& grid);

std::string to_text(const AsciiGrid& grid);
AsciiGrid grid_from_text(std::string_view text);

std::string render_text(const Configuration& config);

// Convenience for tests and CLI --grid arguments: top-first lines, no header.
Configuration parse_lines(const std::vector<std::string>& lines,
                          std::int64_t time = 0);

// A trace file is AsciiGrid blocks separated by blank lines.
std::vector<AsciiGrid> parse_trace(std::string_view text);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// JSON run description (keys: n, k, init{type,density?,m?,grid?},
// params{r,p,policy{type,q?},guard}, mode, trials, seed, max_steps).
// Unknown keys are rejected and probabilities validated to [0,1].
ExperimentSpec load_run_config(const std::string& json_text);
ExperimentSpec load_run_config_file(const std::string& path);

// CSV with the fixed header
// sweep,point,n,k,m,density,policy,q,p,r,mode,trials,seed,mean_t_stable,stderr,timeouts
// one row per sweep point; '.' decimal point, '\n' newlines.
std::string csv_text(const std::vector<SweepRow>& rows);
void write_csv(const std::vector<SweepRow>& rows, const std::string& path);

// Shortest decimal form with a trailing ".0" for integral values.
std::string format_double(double value);

}  // namespace ring_march
