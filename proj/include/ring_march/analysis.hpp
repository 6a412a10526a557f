#pragma once

#include <utility>
#include <vector>

#include "ring_march/core.hpp"

namespace ring_march {

// Maximal run of consecutive same-heading locusts on a track, ordered tail
// to head (each member is the previous member's front). On a heading-uniform
// track the whole track is one degenerate segment whose canonical tail is
// the lowest LocustId. The tail id is the segment's persistent identity
// anchor across steps.
struct Segment {
  int track = 0;
  std::vector<LocustId> members;  // tail first, head last
  Heading heading = Heading::clockwise;

  LocustId tail() const { return members.front(); }
  LocustId head() const { return members.back(); }
};

// Same-heading locusts jammed with directed gaps <= 2 between consecutive
// members (tail-to-head order). Locusts cannot switch tracks into the gaps
// of a compact set.
struct CompactSet {
  std::vector<LocustId> members;  // tail first, head last
  Heading heading = Heading::clockwise;

  LocustId head() const { return members.back(); }
};

// Gap-sum potentials of a two-segment track (clockwise segment P, counter-
// clockwise segment Q): l1 = gaps between consecutive clockwise compact
// sets, l2 = likewise counterclockwise, l3 = gap between the two innermost
// sets. l == 1 exactly when P and Q are in deadlock. f adds the segment
// populations to the same-heading gap slack and never increases over a run.
struct Potentials {
  int l1 = 0;
  int l2 = 0;
  int l3 = 0;
  int l = 0;
  int f = 0;
};

// Partition of a track's locusts into segments, ordered by the lowest x
// coordinate of their members. Throws empty_track.
std::vector<Segment> extract_segments(const Configuration& config, int track);

bool is_track_stable(const Configuration& config, int track);
bool is_locally_stable(const Configuration& config);
bool is_globally_stable(const Configuration& config);

// The unique partition of a track's locusts into maximal compact sets,
// ordered by lowest member x. Throws empty_track.
std::vector<CompactSet> maximal_compact_partition(const Configuration& config,
                                                  int track);

// All pairs (clockwise set, counterclockwise set) of maximal compact sets
// whose facing heads are at clockwise distance 1.
std::vector<std::pair<CompactSet, CompactSet>> detect_deadlocks(
    const Configuration& config, int track);

// Potentials of a track holding exactly two segments with the given tails
// (p_tail clockwise, q_tail counterclockwise). Throws not_two_segments /
// wrong_tails outside that precondition.
Potentials compute_potentials(const Configuration& config, int track,
                              LocustId p_tail, LocustId q_tail);

}  // namespace ring_march
