#include "ring_march/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>

namespace ring_march {

namespace {

std::int64_t binomial(int n, int m) {
  if (m < 0 || m > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= m; ++i) r = r * (n - m + i) / i;
  return r;
}

}  // namespace

StateSpace::StateSpace(int ring_length, int locust_count,
                       std::int64_t state_cap)
    : n_(ring_length), m_(locust_count) {
  if (n_ < 3)
    throw_error(Errc::bad_dimensions, "ring_length must be >= 3");
  if (m_ < 1 || m_ > n_)
    throw_error(Errc::bad_dimensions, "locust_count must be in [1, n]");
  if (n_ + m_ > 62)
    throw_error(Errc::state_space_too_large, "encoding exceeds 62 bits");
  const std::int64_t total = binomial(n_, m_) << m_;
  if (total > state_cap)
    throw_error(Errc::state_space_too_large,
                std::to_string(total) + " states exceed cap " +
                    std::to_string(state_cap));
  states_.reserve(static_cast<std::size_t>(total));
  // Gosper's hack walks every n-bit mask with exactly m bits set.
  const Encoding last = static_cast<Encoding>(1) << n_;
  Encoding mask = (static_cast<Encoding>(1) << m_) - 1;
  while (mask < last) {
    for (Encoding heads = 0; heads < (static_cast<Encoding>(1) << m_); ++heads)
      states_.push_back(mask | (heads << n_));
    const Encoding c = mask & (0 - mask);
    const Encoding r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  std::sort(states_.begin(), states_.end());
}

StateSpace::Encoding StateSpace::encode(const Configuration& config) const {
  if (config.track_count() != 1)
    throw_error(Errc::not_single_track, "state space covers k = 1 only");
  if (config.ring_length() != n_ || config.locust_count() != m_)
    throw_error(Errc::bad_dimensions, "configuration does not match (n, m)");
  Encoding mask = 0, heads = 0;
  int slot = 0;
  for (int x = 0; x < n_; ++x) {
    const LocustId id = config.at(x, 0);
    if (id == kNoLocust) continue;
    mask |= static_cast<Encoding>(1) << x;
    if (config.heading(id) == Heading::clockwise)
      heads |= static_cast<Encoding>(1) << slot;
    ++slot;
  }
  return mask | (heads << n_);
}

Configuration StateSpace::decode(Encoding state) const {
  Configuration config(n_, 1);
  const Encoding mask = state & ((static_cast<Encoding>(1) << n_) - 1);
  const Encoding heads = state >> n_;
  int slot = 0;
  for (int x = 0; x < n_; ++x) {
    if (!(mask >> x & 1)) continue;
    config.add_locust(Coord{x, 0}, (heads >> slot & 1)
                                       ? Heading::clockwise
                                       : Heading::counterclockwise);
    ++slot;
  }
  return config;
}

std::int64_t StateSpace::index_of(Encoding state) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), state);
  if (it == states_.end() || *it != state)
    throw_error(Errc::bad_config, "encoding not in state space");
  return it - states_.begin();
}

bool StateSpace::is_absorbing(std::int64_t index) const {
  const Encoding heads = states_[index] >> n_;
  const Encoding all = (static_cast<Encoding>(1) << m_) - 1;
  return heads == 0 || heads == all;
}

std::vector<std::pair<std::int64_t, double>> StateSpace::successors(
    std::int64_t index) const {
  const Encoding state = states_[index];
  // Unpack to per-cell occupant heading; -1 empty, 1 clockwise, 0 counter.
  std::vector<int> cell(n_, -1);
  std::vector<int> occupants;  // x of each locust, ascending
  {
    int slot = 0;
    for (int x = 0; x < n_; ++x) {
      if (!(state >> x & 1)) continue;
      cell[x] = static_cast<int>(state >> (n_ + slot) & 1);
      occupants.push_back(x);
      ++slot;
    }
  }
  auto wrap = [this](int x) { return ((x % n_) + n_) % n_; };

  // Conflicts: clockwise at x, counterclockwise at x+1.
  std::vector<int> conflict_x;
  for (int x = 0; x < n_; ++x)
    if (cell[x] == 1 && cell[wrap(x + 1)] == 0) conflict_x.push_back(x);
  // Contested cells: empty, approached by a clockwise locust from x-1 and a
  // counterclockwise one from x+1.
  std::vector<int> contest_x;
  for (int x = 0; x < n_; ++x)
    if (cell[x] == -1 && cell[wrap(x - 1)] == 1 && cell[wrap(x + 1)] == 0)
      contest_x.push_back(x);

  const int coins = static_cast<int>(conflict_x.size() + contest_x.size());
  const double weight = std::ldexp(1.0, -coins);

  std::unordered_map<Encoding, double> acc;
  for (std::uint64_t bits = 0; bits < (1ull << coins); ++bits) {
    // Horizontal movement against start occupancy.
    std::vector<int> next(n_, -1);
    for (const int x : occupants) {
      const int h = cell[x];
      const int target = wrap(x + (h == 1 ? 1 : -1));
      bool moves = cell[target] == -1;
      if (moves) {
        // Blocked by losing a contested cell?
        for (std::size_t ci = 0; ci < contest_x.size(); ++ci) {
          if (contest_x[ci] != target) continue;
          const bool cw_wins =
              (bits >> (conflict_x.size() + ci) & 1) != 0;
          moves = (h == 1) == cw_wins;
          break;
        }
      }
      const int land = moves ? target : x;
      assert(next[land] == -1);
      next[land] = h;
    }
    // Conflict flips; conflicting locusts were blocked, so they still sit at
    // their start cells.
    for (std::size_t ci = 0; ci < conflict_x.size(); ++ci) {
      const bool left_wins = (bits >> ci & 1) != 0;
      const int lx = conflict_x[ci];
      const int rx = wrap(lx + 1);
      assert(next[lx] != -1 && next[rx] != -1);
      if (left_wins)
        next[rx] = 1;
      else
        next[lx] = 0;
    }
    // Re-encode.
    Encoding mask = 0, heads = 0;
    int slot = 0;
    for (int x = 0; x < n_; ++x) {
      if (next[x] == -1) continue;
      mask |= static_cast<Encoding>(1) << x;
      if (next[x] == 1) heads |= static_cast<Encoding>(1) << slot;
      ++slot;
    }
    acc[mask | (heads << n_)] += weight;
  }

  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(acc.size());
  for (const auto& [enc, prob] : acc) out.emplace_back(index_of(enc), prob);
  std::sort(out.begin(), out.end());
  return out;
}

OracleResult exact_expected_stabilization(const Configuration& start,
                                          const OracleOptions& options) {
  if (start.track_count() != 1)
    throw_error(Errc::not_single_track, "oracle requires k = 1");
  const StateSpace space(start.ring_length(), start.locust_count(),
                         options.state_cap);
  const std::int64_t start_index = space.index_of(space.encode(start));

  // Index the transient states and solve (I - Q) t = 1.
  std::vector<std::int64_t> transient;
  std::vector<std::int64_t> row_of(space.size(), -1);
  for (std::int64_t i = 0; i < space.size(); ++i) {
    if (space.is_absorbing(i)) continue;
    row_of[i] = static_cast<std::int64_t>(transient.size());
    transient.push_back(i);
  }
  OracleResult result{.expected_t_stable = 0.0, .state_count = space.size()};
  if (row_of[start_index] < 0) return result;  // absorbing start

  const std::int64_t t = static_cast<std::int64_t>(transient.size());
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(t, t);
  for (std::int64_t r = 0; r < t; ++r) {
    for (const auto& [succ, prob] : space.successors(transient[r])) {
      const std::int64_t c = row_of[succ];
      if (c >= 0) system(r, c) -= prob;
    }
  }
  const Eigen::VectorXd expected =
      system.partialPivLu().solve(Eigen::VectorXd::Ones(t));
  result.expected_t_stable = expected(row_of[start_index]);
  return result;
}

std::int64_t gamblers_ruin_expected(std::int64_t a, std::int64_t b) {
  if (a < 1 || b < 1)
    throw_error(Errc::nonpositive_size,
                "segment sizes must be >= 1, got " + std::to_string(a) + ", " +
                    std::to_string(b));
  return a * b;
}

WalkStats multi_walk_max_absorption(int k_walks, int n, int start,
                                    std::int64_t trials, RngStream& rng) {
  if (n < 1 || start < 0 || start > 2 * n)
    throw_error(Errc::bad_barriers,
                "need 0 <= start <= 2n with n >= 1, got start=" +
                    std::to_string(start) + " n=" + std::to_string(n));
  if (k_walks < 1 || trials < 1)
    throw_error(Errc::bad_barriers, "k_walks and trials must be >= 1");
  const int top = 2 * n;
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::int64_t max_time = 0;
    for (int w = 0; w < k_walks; ++w) {
      int pos = start;
      std::int64_t time = 0;
      while (pos != 0 && pos != top) {
        pos += rng.coin() ? 1 : -1;
        ++time;
      }
      max_time = std::max(max_time, time);
    }
    sum += static_cast<double>(max_time);
    sum_sq += static_cast<double>(max_time) * static_cast<double>(max_time);
  }
  WalkStats stats;
  stats.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    const double var =
        (sum_sq - sum * sum / static_cast<double>(trials)) /
        static_cast<double>(trials - 1);
    stats.stderr_of_mean = std::sqrt(std::max(0.0, var) /
                                     static_cast<double>(trials));
  }
  return stats;
}

}  // namespace ring_march
