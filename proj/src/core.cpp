#include "ring_march/core.hpp"

namespace ring_march {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::duplicate_occupancy: return "DuplicateOccupancy";
    case Errc::underpopulated_track: return "UnderpopulatedTrack";
    case Errc::bad_dimensions: return "BadDimensions";
    case Errc::unknown_locust: return "UnknownLocust";
    case Errc::different_tracks: return "DifferentTracks";
    case Errc::empty_track: return "EmptyTrack";
    case Errc::not_two_segments: return "NotTwoSegments";
    case Errc::wrong_tails: return "WrongTails";
    case Errc::state_space_too_large: return "StateSpaceTooLarge";
    case Errc::not_single_track: return "NotSingleTrack";
    case Errc::nonpositive_size: return "NonpositiveSize";
    case Errc::bad_barriers: return "BadBarriers";
    case Errc::infeasible_guard: return "InfeasibleGuard";
    case Errc::odd_m: return "OddM";
    case Errc::too_full: return "TooFull";
    case Errc::bad_glyph: return "BadGlyph";
    case Errc::ragged_lines: return "RaggedLines";
    case Errc::io_error: return "IoError";
    case Errc::bad_config: return "BadConfig";
  }
  return "UnknownError";
}

void throw_error(Errc code, const std::string& what) {
  throw ModelError(code, std::string(errc_name(code)) + ": " + what);
}

Configuration::Configuration(int ring_length, int track_count)
    : n_(ring_length), k_(track_count) {
  if (n_ < 1 || k_ < 1)
    throw_error(Errc::bad_dimensions,
                "ring_length and track_count must be positive, got n=" +
                    std::to_string(n_) + " k=" + std::to_string(k_));
  cells_.assign(static_cast<std::size_t>(n_) * k_, kNoLocust);
  track_population_.assign(k_, 0);
}

void Configuration::check_id(LocustId id) const {
  if (id < 0 || id >= locust_count())
    throw_error(Errc::unknown_locust, "no locust with id " + std::to_string(id));
}

LocustId Configuration::add_locust(Coord cell, Heading h) {
  if (cell.y < 0 || cell.y >= k_)
    throw_error(Errc::bad_dimensions,
                "track " + std::to_string(cell.y) + " outside [0, " +
                    std::to_string(k_) + ")");
  cell.x = wrap_x(cell.x);
  LocustId& slot = cells_[cell_index(cell.x, cell.y)];
  if (slot != kNoLocust)
    throw_error(Errc::duplicate_occupancy,
                "cell (" + std::to_string(cell.x) + "," +
                    std::to_string(cell.y) + ") already holds locust " +
                    std::to_string(slot));
  const LocustId id = locust_count();
  slot = id;
  positions_.push_back(cell);
  headings_.push_back(h);
  ++track_population_[cell.y];
  return id;
}

void Configuration::move_locust(LocustId id, Coord to) {
  check_id(id);
  if (to.y < 0 || to.y >= k_)
    throw_error(Errc::bad_dimensions,
                "move target track " + std::to_string(to.y) + " outside arena");
  to.x = wrap_x(to.x);
  LocustId& dst = cells_[cell_index(to.x, to.y)];
  if (dst != kNoLocust)
    throw_error(Errc::duplicate_occupancy,
                "move target (" + std::to_string(to.x) + "," +
                    std::to_string(to.y) + ") occupied by locust " +
                    std::to_string(dst));
  const Coord from = positions_[id];
  cells_[cell_index(from.x, from.y)] = kNoLocust;
  dst = id;
  positions_[id] = to;
  --track_population_[from.y];
  ++track_population_[to.y];
}

std::vector<LocustId> Configuration::scan_order() const {
  std::vector<LocustId> out;
  out.reserve(positions_.size());
  for (const LocustId id : cells_)
    if (id != kNoLocust) out.push_back(id);
  return out;
}

int dist_cw(const Configuration& config, Coord from, Coord to) {
  if (from.y != to.y)
    throw_error(Errc::different_tracks,
                "distance between tracks " + std::to_string(from.y) + " and " +
                    std::to_string(to.y));
  return config.wrap_x(to.x - from.x);
}

int dist_ccw(const Configuration& config, Coord from, Coord to) {
  return dist_cw(config, to, from);
}

namespace {

// First occupied cell from (x, y), exclusive, stepping by dir; kNoLocust if
// the rest of the track is empty.
LocustId first_on_track(const Configuration& config, int x, int y, int dir) {
  const int n = config.ring_length();
  for (int i = 1; i <= n; ++i) {
    const LocustId id = config.at(x + dir * i, y);
    if (id != kNoLocust) return id;
  }
  return kNoLocust;
}

}  // namespace

LocustId front_of(const Configuration& config, LocustId a) {
  const Coord pos = config.position(a);
  const int dir = direction(config.heading(a));
  const LocustId hit = first_on_track(config, pos.x, pos.y, dir);
  // Scanning n steps from a's own cell wraps back to a when it is alone.
  return hit == kNoLocust ? a : hit;
}

LocustId back_of(const Configuration& config, LocustId a) {
  const Coord pos = config.position(a);
  const int dir = -direction(config.heading(a));
  const LocustId hit = first_on_track(config, pos.x, pos.y, dir);
  return hit == kNoLocust ? a : hit;
}

void validate(const Configuration& config, const ModelParams& params) {
  if (config.ring_length() < 3)
    throw_error(Errc::bad_dimensions,
                "ring_length must be >= 3, got " +
                    std::to_string(config.ring_length()));
  // Cross-check the grid against the per-locust positions; each locust in
  // exactly one cell and each cell naming a locust that points back at it.
  std::vector<int> seen(config.locust_count(), 0);
  for (int y = 0; y < config.track_count(); ++y) {
    for (int x = 0; x < config.ring_length(); ++x) {
      const LocustId id = config.at(x, y);
      if (id == kNoLocust) continue;
      if (id < 0 || id >= config.locust_count() || ++seen[id] > 1 ||
          !(config.position(id) == Coord{x, y}))
        throw_error(Errc::duplicate_occupancy,
                    "inconsistent occupancy at (" + std::to_string(x) + "," +
                        std::to_string(y) + ")");
    }
  }
  for (LocustId id = 0; id < config.locust_count(); ++id)
    if (seen[id] != 1)
      throw_error(Errc::duplicate_occupancy,
                  "locust " + std::to_string(id) + " not on the grid");
  if (params.guard_min_two_per_track) {
    for (int y = 0; y < config.track_count(); ++y)
      if (config.track_population(y) < 2)
        throw_error(Errc::underpopulated_track,
                    "track " + std::to_string(y) + " holds " +
                        std::to_string(config.track_population(y)) +
                        " locusts, needs >= 2");
  }
}

}  // namespace ring_march
