#include "ring_march/analysis.hpp"

#include <algorithm>
#include <cassert>

namespace ring_march {

namespace {

struct TrackCell {
  int x;
  LocustId id;
};

// Occupants of a track in ascending x order.
std::vector<TrackCell> track_occupants(const Configuration& config, int track) {
  std::vector<TrackCell> out;
  for (int x = 0; x < config.ring_length(); ++x) {
    const LocustId id = config.at(x, track);
    if (id != kNoLocust) out.push_back({x, id});
  }
  return out;
}

int min_x(const Configuration& config, const std::vector<LocustId>& ids) {
  int best = config.ring_length();
  for (const LocustId id : ids) best = std::min(best, config.position(id).x);
  return best;
}

// Directed gap from a to its front b along heading h.
int directed_gap(const Configuration& config, LocustId a, LocustId b,
                 Heading h) {
  return h == Heading::clockwise
             ? dist_cw(config, config.position(a), config.position(b))
             : dist_ccw(config, config.position(a), config.position(b));
}

// Splits a tail-to-head member chain wherever the directed gap between
// consecutive members exceeds 2.
std::vector<CompactSet> chunk_compact(const Configuration& config,
                                      const std::vector<LocustId>& members,
                                      Heading h) {
  std::vector<CompactSet> out;
  CompactSet current{.members = {members.front()}, .heading = h};
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (directed_gap(config, members[i - 1], members[i], h) > 2) {
      out.push_back(std::move(current));
      current = CompactSet{.members = {}, .heading = h};
    }
    current.members.push_back(members[i]);
  }
  out.push_back(std::move(current));
  return out;
}

}  // namespace

std::vector<Segment> extract_segments(const Configuration& config, int track) {
  const std::vector<TrackCell> cells = track_occupants(config, track);
  if (cells.empty())
    throw_error(Errc::empty_track, "track " + std::to_string(track));
  const int count = static_cast<int>(cells.size());

  const bool uniform = std::all_of(cells.begin(), cells.end(),
                                   [&](const TrackCell& c) {
                                     return config.heading(c.id) ==
                                            config.heading(cells[0].id);
                                   });
  std::vector<Segment> segments;
  if (uniform) {
    // No tail exists by the run definition; the whole track is one
    // degenerate segment anchored at the lowest id.
    const Heading h = config.heading(cells[0].id);
    int start = 0;
    for (int i = 1; i < count; ++i)
      if (cells[i].id < cells[start].id) start = i;
    Segment seg{.track = track, .members = {}, .heading = h};
    const int dir = h == Heading::clockwise ? 1 : -1;
    for (int i = 0; i < count; ++i)
      seg.members.push_back(
          cells[((start + dir * i) % count + count) % count].id);
    segments.push_back(std::move(seg));
  } else {
    // Run starts: occupants whose predecessor in ring order differs in
    // heading. A clockwise run reads tail-to-head in ascending x, a
    // counterclockwise run in descending x.
    for (int i = 0; i < count; ++i) {
      const Heading h = config.heading(cells[i].id);
      const Heading prev = config.heading(cells[(i + count - 1) % count].id);
      if (prev == h) continue;
      std::vector<LocustId> run{cells[i].id};
      int j = i;
      while (config.heading(cells[(j + 1) % count].id) == h) {
        j = (j + 1) % count;
        run.push_back(cells[j].id);
      }
      // Ascending ring order reads a clockwise run tail-to-head; a
      // counterclockwise run's tail sits at the clockwise end, so reverse.
      if (h == Heading::counterclockwise) std::reverse(run.begin(), run.end());
      segments.push_back(Segment{track, std::move(run), h});
    }
  }
  std::sort(segments.begin(), segments.end(),
            [&](const Segment& a, const Segment& b) {
              return min_x(config, a.members) < min_x(config, b.members);
            });
  return segments;
}

bool is_track_stable(const Configuration& config, int track) {
  Heading h = Heading::clockwise;
  bool seen = false;
  for (int x = 0; x < config.ring_length(); ++x) {
    const LocustId id = config.at(x, track);
    if (id == kNoLocust) continue;
    if (!seen) {
      h = config.heading(id);
      seen = true;
    } else if (config.heading(id) != h) {
      return false;
    }
  }
  return true;
}

bool is_locally_stable(const Configuration& config) {
  for (int y = 0; y < config.track_count(); ++y)
    if (!is_track_stable(config, y)) return false;
  return true;
}

bool is_globally_stable(const Configuration& config) {
  for (LocustId id = 1; id < config.locust_count(); ++id)
    if (config.heading(id) != config.heading(0)) return false;
  return true;
}

std::vector<CompactSet> maximal_compact_partition(const Configuration& config,
                                                  int track) {
  const std::vector<Segment> segments = extract_segments(config, track);
  std::vector<CompactSet> out;
  if (segments.size() == 1 &&
      segments[0].members.size() == static_cast<std::size_t>(
          config.track_population(track))) {
    // Uniform track: the member chain is cyclic, so chunk it cyclically.
    const Segment& seg = segments[0];
    const Heading h = seg.heading;
    const int count = static_cast<int>(seg.members.size());
    int first_cut = -1;
    for (int i = 0; i < count; ++i) {
      const LocustId a = seg.members[i];
      const LocustId b = seg.members[(i + 1) % count];
      if (count == 1 || directed_gap(config, a, b, h) > 2) {
        first_cut = i;
        break;
      }
    }
    if (first_cut < 0) {
      // Every cyclic gap is <= 2: all of it is one compact set (drop the
      // closing gap from the chain).
      out.push_back(CompactSet{seg.members, h});
    } else {
      std::vector<LocustId> rotated;
      for (int i = 1; i <= count; ++i)
        rotated.push_back(seg.members[(first_cut + i) % count]);
      out = chunk_compact(config, rotated, h);
    }
  } else {
    for (const Segment& seg : segments) {
      auto chunks = chunk_compact(config, seg.members, seg.heading);
      out.insert(out.end(), std::make_move_iterator(chunks.begin()),
                 std::make_move_iterator(chunks.end()));
    }
  }
  std::sort(out.begin(), out.end(), [&](const CompactSet& a, const CompactSet& b) {
    return min_x(config, a.members) < min_x(config, b.members);
  });
  return out;
}

std::vector<std::pair<CompactSet, CompactSet>> detect_deadlocks(
    const Configuration& config, int track) {
  std::vector<std::pair<CompactSet, CompactSet>> out;
  if (config.track_population(track) == 0) return out;
  const std::vector<CompactSet> sets = maximal_compact_partition(config, track);
  for (const CompactSet& cw : sets) {
    if (cw.heading != Heading::clockwise) continue;
    for (const CompactSet& ccw : sets) {
      if (ccw.heading != Heading::counterclockwise) continue;
      if (dist_cw(config, config.position(cw.head()),
                  config.position(ccw.head())) == 1)
        out.emplace_back(cw, ccw);
    }
  }
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    return config.position(a.first.head()).x < config.position(b.first.head()).x;
  });
  return out;
}

Potentials compute_potentials(const Configuration& config, int track,
                              LocustId p_tail, LocustId q_tail) {
  const std::vector<Segment> segments = extract_segments(config, track);
  if (segments.size() != 2)
    throw_error(Errc::not_two_segments,
                "track " + std::to_string(track) + " has " +
                    std::to_string(segments.size()) + " segments");
  const Segment* p = nullptr;
  const Segment* q = nullptr;
  for (const Segment& seg : segments) {
    if (seg.tail() == p_tail) p = &seg;
    if (seg.tail() == q_tail) q = &seg;
  }
  if (!p || !q || p == q || p->heading != Heading::clockwise ||
      q->heading != Heading::counterclockwise)
    throw_error(Errc::wrong_tails,
                "tails " + std::to_string(p_tail) + "/" +
                    std::to_string(q_tail) +
                    " are not the clockwise/counterclockwise segment tails");

  // Work in positions relative to P's tail; every locust of the track lies
  // in the clockwise interval [P tail, Q tail].
  const Coord origin = config.position(p_tail);
  auto rel = [&](LocustId id) {
    return dist_cw(config, origin, config.position(id));
  };
  const int d = rel(q_tail);

  const std::vector<CompactSet> cw_sets =
      chunk_compact(config, p->members, Heading::clockwise);
  const std::vector<CompactSet> ccw_sets =
      chunk_compact(config, q->members, Heading::counterclockwise);

  auto set_min_rel = [&](const CompactSet& s) {
    int best = d;
    for (const LocustId id : s.members) best = std::min(best, rel(id));
    return best;
  };
  auto set_max_rel = [&](const CompactSet& s) {
    int best = 0;
    for (const LocustId id : s.members) best = std::max(best, rel(id));
    return best;
  };

  Potentials pot;
  // Clockwise sets ascend in rel from the tail; gaps between consecutive sets.
  for (std::size_t i = 0; i + 1 < cw_sets.size(); ++i)
    pot.l1 += set_min_rel(cw_sets[i + 1]) - set_max_rel(cw_sets[i]);
  // Counterclockwise sets descend in rel from Q's tail at rel d.
  for (std::size_t i = 0; i + 1 < ccw_sets.size(); ++i)
    pot.l2 += set_min_rel(ccw_sets[i]) - set_max_rel(ccw_sets[i + 1]);
  pot.l3 = set_min_rel(ccw_sets.back()) - set_max_rel(cw_sets.back());
  assert(pot.l1 >= 0 && pot.l2 >= 0 && pot.l3 >= 1);
  pot.l = pot.l1 + pot.l2 + pot.l3;
  pot.f = (pot.l1 - (static_cast<int>(cw_sets.size()) - 1)) +
          (pot.l2 - (static_cast<int>(ccw_sets.size()) - 1)) +
          static_cast<int>(p->members.size() + q->members.size());
  return pot;
}

}  // namespace ring_march
