#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ring_march {

enum class Errc {
  duplicate_occupancy,
  underpopulated_track,
  bad_dimensions,
  unknown_locust,
  different_tracks,
  empty_track,
  not_two_segments,
  wrong_tails,
  state_space_too_large,
  not_single_track,
  nonpositive_size,
  bad_barriers,
  infeasible_guard,
  odd_m,
  too_full,
  bad_glyph,
  ragged_lines,
  io_error,
  bad_config,
};

const char* errc_name(Errc code);

class ModelError : public std::runtime_error {
 public:
  ModelError(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void throw_error(Errc code, const std::string& what);

// Direction of marching. Clockwise adds +1 to x each step, counterclockwise
// subtracts 1.
enum class Heading : std::int8_t { clockwise = 1, counterclockwise = -1 };

constexpr int direction(Heading h) { return static_cast<int>(h); }

constexpr Heading opposite(Heading h) {
  return h == Heading::clockwise ? Heading::counterclockwise
                                 : Heading::clockwise;
}

constexpr char heading_glyph(Heading h) {
  return h == Heading::clockwise ? '>' : '<';
}

// Cell on the cylinder. x is a ring position (arithmetic modulo the ring
// length n), y is a track index in [0, k) counted from the bottom track.
// Tracks do not wrap: y-1 below track 0 and y+1 above track k-1 are outside
// the arena.
struct Coord {
  int x = 0;
  int y = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
};

using LocustId = std::int32_t;
inline constexpr LocustId kNoLocust = -1;

struct SwitchPolicy {
  enum class Kind { never, eager, probabilistic };

  Kind kind = Kind::never;
  double q = 0.0;  // move probability when eligible; probabilistic only

  static SwitchPolicy never() { return {Kind::never, 0.0}; }
  static SwitchPolicy eager() { return {Kind::eager, 0.0}; }
  static SwitchPolicy probabilistic(double q) {
    return {Kind::probabilistic, q};
  }
};

struct ModelParams {
  double rest_probability = 0.0;     // r: chance of an erratic horizontal rest
  double erratic_probability = 0.0;  // p: chance of an erratic vertical move
  SwitchPolicy policy = SwitchPolicy::never();
  bool guard_min_two_per_track = true;
};

// Full lattice state: occupancy grid plus per-locust position and heading,
// and the step counter. Locust ids are dense integers [0, m) assigned in
// scan order (ascending track, then ascending x) at initialization and are
// stable across moves, flips and track switches.
class Configuration {
 public:
  Configuration(int ring_length, int track_count);

  int ring_length() const { return n_; }
  int track_count() const { return k_; }
  int locust_count() const { return static_cast<int>(positions_.size()); }

  std::int64_t time() const { return time_; }
  void set_time(std::int64_t t) { time_ = t; }

  int wrap_x(int x) const {
    int r = x % n_;
    return r < 0 ? r + n_ : r;
  }

  // Throws duplicate_occupancy if the cell is taken; returns the new id.
  LocustId add_locust(Coord cell, Heading h);

  LocustId at(int x, int y) const { return cells_[cell_index(x, y)]; }
  LocustId at(Coord c) const { return at(c.x, c.y); }
  bool occupied(int x, int y) const { return at(x, y) != kNoLocust; }
  bool occupied(Coord c) const { return occupied(c.x, c.y); }

  Coord position(LocustId id) const {
    check_id(id);
    return positions_[id];
  }
  Heading heading(LocustId id) const {
    check_id(id);
    return headings_[id];
  }
  void set_heading(LocustId id, Heading h) {
    check_id(id);
    headings_[id] = h;
  }

  // Target must be empty and on the cylinder.
  void move_locust(LocustId id, Coord to);

  int track_population(int y) const { return track_population_[y]; }

  // Ids ordered by (track, x) of their current cell — the canonical scan
  // order all random draws follow.
  std::vector<LocustId> scan_order() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  int cell_index(int x, int y) const {
    assert(y >= 0 && y < k_);
    return y * n_ + wrap_x(x);
  }
  void check_id(LocustId id) const;

  int n_ = 0;
  int k_ = 0;
  std::int64_t time_ = 0;
  std::vector<LocustId> cells_;       // n*k, kNoLocust when empty
  std::vector<Coord> positions_;      // by id, x stored normalized
  std::vector<Heading> headings_;     // by id
  std::vector<int> track_population_;
};

// Clockwise steps from one cell to another on the same track, in [0, n).
// dist_cw(a, a) == 0. Throws different_tracks.
int dist_cw(const Configuration& config, Coord from, Coord to);
int dist_ccw(const Configuration& config, Coord from, Coord to);

// First locust encountered from a's cell stepping in a's heading direction
// on its own track; a itself when it is alone on the track.
LocustId front_of(const Configuration& config, LocustId a);
// Mirror of front_of in the opposite direction.
LocustId back_of(const Configuration& config, LocustId a);

// Checks occupancy consistency, ring_length >= 3, track_count >= 1, and —
// when the guard is enabled — that every track holds at least 2 locusts.
// Throws duplicate_occupancy / bad_dimensions / underpopulated_track.
void validate(const Configuration& config, const ModelParams& params);

}  // namespace ring_march
