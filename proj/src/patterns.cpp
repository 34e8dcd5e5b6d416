#include "uctadp/patterns.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace uctadp {

namespace {

using PC = PatternClass;
using PF = PatternFamily;

constexpr std::array<PatternInfo, kNumPatterns> kCatalog{{
    {0, "XXXXX", "five", PC::Open, 5, 0, PF::Five},
    {1, ".XXXX.", "live four", PC::Open, 4, 0, PF::Four},
    {2, "|XXXX.", "sleep four", PC::HalfClosed, 4, 0, PF::Four},
    {3, "..XXX..", "live three", PC::Open, 3, 0, PF::OpenThree},
    {4, ".XX.XX.", "open split four", PC::HalfClosed, 4, 1, PF::Four},
    {5, "..XX.X..", "jump three", PC::Open, 3, 1, PF::OpenThree},
    {6, ".XXX.X.", "open broken four", PC::HalfClosed, 4, 1, PF::Four},
    {7, "|X.XXX.", "sleep broken four, gap near block", PC::HalfClosed, 4, 1, PF::Four},
    {8, "|XXX.X.", "sleep broken four, gap far from block", PC::HalfClosed, 4, 1, PF::Four},
    {9, "|XXX.X|", "closed broken four", PC::HalfClosed, 4, 1, PF::Four},
    {10, "|XX.XX.", "sleep split four", PC::HalfClosed, 4, 1, PF::Four},
    {11, "|XX.XX|", "closed split four", PC::HalfClosed, 4, 1, PF::Four},
    {12, "|.XXX..", "cramped live three", PC::Open, 3, 2, PF::OpenThree},
    {13, "|.XX.X..", "cramped jump three", PC::Open, 3, 2, PF::OpenThree},
    {14, ".X.X.X.", "double-jump three", PC::Open, 3, 2, PF::OpenThree},
    {15, ".XX..X.", "wide three", PC::Open, 3, 2, PF::OpenThree},
    {16, "|XXX..", "sleep three", PC::HalfClosed, 3, 0, PF::Minor},
    {17, "..XX..", "live two", PC::Open, 2, 0, PF::Minor},
    {18, "|X.XX.", "sleep jump three, gap near block", PC::HalfClosed, 3, 1, PF::Minor},
    {19, "|XX.X.", "sleep jump three, gap far from block", PC::HalfClosed, 3, 1, PF::Minor},
    {20, "..X.X..", "jump two", PC::Open, 2, 1, PF::Minor},
    {21, "|X.X.X.", "sleep double-jump three", PC::HalfClosed, 3, 2, PF::Minor},
    {22, "|X.X.X|", "closed double-jump three", PC::HalfClosed, 3, 2, PF::Minor},
    {23, "|XX..X.", "sleep wide three, pair at block", PC::HalfClosed, 3, 2, PF::Minor},
    {24, "|X..XX.", "sleep wide three, pair away from block", PC::HalfClosed, 3, 2, PF::Minor},
    {25, "|XX..X|", "closed wide three", PC::HalfClosed, 3, 2, PF::Minor},
    {26, ".X..X.", "wide two", PC::Open, 2, 2, PF::Minor},
    {27, "|.XX..", "cramped live two", PC::Open, 2, 2, PF::Minor},
    {28, "|.X.X..", "cramped jump two", PC::Open, 2, 2, PF::Minor},
    {29, "|XX...", "sleep two", PC::HalfClosed, 2, 0, PF::Minor},
    {30, "|X.X..", "sleep jump two", PC::HalfClosed, 2, 1, PF::Minor},
    {31, "|X..X.", "sleep wide two", PC::HalfClosed, 2, 2, PF::Minor},
}};

std::array<double, kNumPatterns> build_values() {
  std::array<double, kNumPatterns> v{};
  for (const auto& p : kCatalog) v[p.id] = closed_form_value(p.cls, p.length, p.decay);
  return v;
}

const std::array<double, kNumPatterns>& values() {
  static const auto v = build_values();
  return v;
}

// Shape of a group from its first to its last stone, 'X' stone and '_' gap.
std::string shape_of(unsigned mask, int lo, int hi) {
  std::string s;
  for (int i = lo; i <= hi; ++i) s += (mask >> i & 1u) ? 'X' : '_';
  return s;
}

int classify_group(const std::string& s, int left_room, int right_room) {
  if (s.find('_') == std::string::npos && s.size() >= 5) return 0;
  std::string r(s.rbegin(), s.rend());
  const bool left_blocked = left_room == 0;
  const bool right_blocked = right_room == 0;

  if (!left_blocked && !right_blocked) {
    const std::string c = std::min(s, r);
    const bool cramped = std::min(left_room, right_room) == 1;
    if (c == "XXXX") return 1;
    if (c == "XX_XX") return 4;
    if (c == "XXX_X") return 6;
    if (c == "XXX") return cramped ? 12 : 3;
    if (c == "XX_X") return cramped ? 13 : 5;
    if (c == "X_X_X") return 14;
    if (c == "XX__X") return 15;
    if (c == "XX") return cramped ? 27 : 17;
    if (c == "X_X") return cramped ? 28 : 20;
    if (c == "X__X") return 26;
    return -1;
  }
  if (left_blocked && right_blocked) {
    const std::string c = std::min(s, r);
    if (c == "XXX_X") return 9;
    if (c == "XX_XX") return 11;
    if (c == "X_X_X") return 22;
    if (c == "XX__X") return 25;
    return -1;
  }
  const std::string& c = left_blocked ? s : r;
  if (c == "XXXX") return 2;
  if (c == "X_XXX") return 7;
  if (c == "XXX_X") return 8;
  if (c == "XX_XX") return 10;
  if (c == "XXX") return 16;
  if (c == "X_XX") return 18;
  if (c == "XX_X") return 19;
  if (c == "X_X_X") return 21;
  if (c == "XX__X") return 23;
  if (c == "X__XX") return 24;
  if (c == "XX") return 29;
  if (c == "X_X") return 30;
  if (c == "X__X") return 31;
  return -1;
}

struct Run {
  int start;
  int len;
};

struct Candidate {
  std::vector<int> sizes;  // group stone counts, descending
  double value = 0;
  std::vector<int> ids;  // ascending
  std::vector<LineGroup> groups;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.sizes != b.sizes) return a.sizes > b.sizes;
  if (std::abs(a.value - b.value) > 1e-9) return a.value > b.value;
  return a.ids < b.ids;
}

std::vector<LineGroup> classify_uncached(int len, unsigned mask) {
  std::vector<Run> runs;
  for (int i = 0; i < len;) {
    if (!(mask >> i & 1u)) {
      ++i;
      continue;
    }
    int j = i;
    while (j < len && (mask >> j & 1u)) ++j;
    runs.push_back({i, j - i});
    i = j;
  }
  if (runs.empty()) return {};

  const int k = static_cast<int>(runs.size());
  std::optional<Candidate> best;
  // Bit i of `cuts` separates run i from run i + 1.
  for (unsigned cuts = 0; cuts < (1u << (k - 1)); ++cuts) {
    Candidate cand;
    bool valid = true;
    int first = 0;
    for (int i = 0; i < k && valid; ++i) {
      if (i != k - 1 && !(cuts >> i & 1u)) continue;
      const int lo = runs[first].start;
      const int hi = runs[i].start + runs[i].len - 1;
      int stones = 0;
      for (int j = first; j <= i; ++j) stones += runs[j].len;
      const int span = hi - lo + 1;
      const bool single_run = first == i;
      if (!single_run) {
        for (int j = first; j <= i; ++j) valid = valid && runs[j].len < 5;
        valid = valid && span <= (stones == 2 ? 4 : 5);
      }
      if (valid) {
        cand.sizes.push_back(stones);
        if (stones >= 2) {
          const int id = classify_group(shape_of(mask, lo, hi), lo, len - 1 - hi);
          if (id < 0) {
            valid = false;
          } else {
            cand.value += values()[id];
            cand.ids.push_back(id);
            cand.groups.push_back({static_cast<std::uint8_t>(id), static_cast<std::uint8_t>(lo),
                                   static_cast<std::uint8_t>(hi)});
          }
        }
      }
      first = i + 1;
    }
    if (!valid) continue;
    std::sort(cand.sizes.rbegin(), cand.sizes.rend());
    std::sort(cand.ids.begin(), cand.ids.end());
    if (!best || better(cand, *best)) best = std::move(cand);
  }
  return best ? best->groups : std::vector<LineGroup>{};
}

struct SegmentTable {
  struct Entry {
    std::uint32_t start;
    std::uint8_t count;
  };
  std::array<std::uint32_t, kBoardSize + 1> base{};
  std::vector<Entry> entries;
  std::vector<LineGroup> pool;

  // 16 slots per (len, mask), filled on first use; 0 is unfilled, otherwise id + 2.
  mutable std::vector<std::atomic<std::int8_t>> offense_ids;

  SegmentTable() {
    std::uint32_t total = 0;
    for (int len = 5; len <= kBoardSize; ++len) {
      base[len] = total;
      total += 1u << len;
    }
    entries.resize(total);
    for (int len = 5; len <= kBoardSize; ++len) {
      for (unsigned mask = 0; mask < (1u << len); ++mask) {
        const auto groups = classify_uncached(len, mask);
        entries[base[len] + mask] = {static_cast<std::uint32_t>(pool.size()), static_cast<std::uint8_t>(groups.size())};
        pool.insert(pool.end(), groups.begin(), groups.end());
      }
    }
    offense_ids = std::vector<std::atomic<std::int8_t>>(static_cast<std::size_t>(total) * 16);
  }

  std::span<const LineGroup> lookup(int len, unsigned mask) const {
    const Entry e = entries[base[len] + mask];
    return {pool.data() + e.start, e.count};
  }

  int offense(int len, unsigned mask, int at) const {
    auto& slot = offense_ids[(base[len] + mask) * 16 + at];
    int v = slot.load(std::memory_order_relaxed);
    if (v == 0) {
      v = offense_uncached(len, mask, at) + 2;
      slot.store(static_cast<std::int8_t>(v), std::memory_order_relaxed);
    }
    return v - 2;
  }

  // Catalog id of the group through stone `at`, or -1.
  int offense_uncached(int seg, unsigned local, int at) const {
    // Mirror-image splits of a segment can tie; take m's better group of the two.
    auto group_at = [this, seg](unsigned bits, int i) {
      for (const LineGroup& grp : lookup(seg, bits))
        if (grp.lo <= i && i <= grp.hi) return static_cast<int>(grp.id);
      return -1;
    };
    unsigned mirrored = 0;
    for (int i = 0; i < seg; ++i) mirrored |= (local >> i & 1u) << (seg - 1 - i);
    int id = group_at(local, at);
    const int other = group_at(mirrored, seg - 1 - at);
    if (other >= 0 && (id < 0 || pattern_value(other) > pattern_value(id) ||
                       (pattern_value(other) == pattern_value(id) && other < id)))
      id = other;
    if (id >= 0 && is_four_class(id)) return id;
    // Gaps whose filling would run into an overline are not in the group table.
    const unsigned before = local & ~(1u << at);
    auto run_through = [seg](unsigned bits, int c) {
      int lo = c, hi = c;
      while (lo > 0 && (bits >> (lo - 1) & 1u)) --lo;
      while (hi + 1 < seg && (bits >> (hi + 1) & 1u)) ++hi;
      return hi - lo + 1;
    };
    for (int c = std::max(0, at - 5); c <= std::min(seg - 1, at + 5); ++c) {
      if (local >> c & 1u) continue;
      if (run_through(local | 1u << c, c) >= 5 && run_through(before | 1u << c, c) < 5) return 8;
    }
    return id;
  }
};

const SegmentTable& table() {
  static const SegmentTable t;
  return t;
}

constexpr unsigned kLow16 = 0xFFFFu;

}  // namespace

void prepare_pattern_tables() { table(); }

const std::array<PatternInfo, kNumPatterns>& pattern_catalog() { return kCatalog; }

double closed_form_value(PatternClass cls, int length, int decay) {
  const int exponent = cls == PatternClass::Open ? length : length - 1;
  return std::pow(10.0, exponent) * std::pow(kDecay, decay);
}

double pattern_value(int id) { return values()[id]; }

std::string catalog_table() {
  std::string out = "id\tascii\tclass\tlength\tdecay\tvalue\tname\n";
  char buf[256];
  for (const auto& p : kCatalog) {
    std::snprintf(buf, sizeof buf, "%d\t%s\t%s\t%d\t%d\t%.10g\t%s\n", p.id, p.ascii,
                  p.cls == PatternClass::Open ? "open" : "half-closed", p.length, p.decay, pattern_value(p.id), p.name);
    out += buf;
  }
  return out;
}

std::span<const LineGroup> classify_segment(int len, unsigned mask) {
  if (len < 5 || len > kBoardSize) return {};
  return table().lookup(len, mask & ((1u << len) - 1));
}

PatternCounts scan_patterns(const Board& board, Player p) {
  PatternCounts counts{};
  const auto& g = line_geometry();
  const auto& t = table();
  const Player o = opponent(p);
  for (int d = 0; d < kNumDirections; ++d) {
    for (int line = 0; line < g.num_lines[d]; ++line) {
      const int len = g.length[d][line];
      if (len < 5) continue;
      const unsigned own = board.line_bits(p, d, line);
      if (own == 0) continue;
      const unsigned full = (1u << len) - 1;
      unsigned free = ~static_cast<unsigned>(board.line_bits(o, d, line)) & full;
      while (free) {
        const int a = __builtin_ctz(free);
        const int seg = __builtin_ctz(~(free >> a));
        const unsigned seg_mask = (1u << seg) - 1;
        free &= ~(seg_mask << a);
        if (seg < 5) continue;
        const unsigned local = (own >> a) & seg_mask;
        if (local == 0) continue;
        for (const LineGroup& grp : t.lookup(seg, local)) ++counts[grp.id];
      }
    }
  }
  return counts;
}

int offense_pattern(const Board& board, Move m, Player p, int dir) {
  const auto& g = line_geometry();
  const LinePos lp = g.at[dir][m.index()];
  const int len = g.length[dir][lp.line];
  if (len < 5) return -1;
  const int pos = lp.pos;
  const unsigned blocked = (static_cast<unsigned>(board.line_bits(opponent(p), dir, lp.line)) | ~((1u << len) - 1)) & kLow16;
  const unsigned below = blocked & ((1u << pos) - 1);
  const int a = below ? 32 - __builtin_clz(below) : 0;
  const int b = pos + 1 + __builtin_ctz((blocked | ~kLow16) >> (pos + 1));
  const int seg = b - a;
  if (seg < 5) return -1;
  const unsigned own = static_cast<unsigned>(board.line_bits(p, dir, lp.line)) | (1u << pos);
  const unsigned local = (own >> a) & ((1u << seg) - 1);
  return table().offense(seg, local, pos - a);
}

double offense_value(const Board& board, Move m, Player p) {
  double sum = 0;
  for (int d = 0; d < kNumDirections; ++d) {
    const int id = offense_pattern(board, m, p, d);
    if (id >= 0) sum += pattern_value(id);
  }
  return sum;
}

double exp_heuristic(const Board& board, Move m, Player mover) {
  if (!m.in_bounds() || !board.empty_at(m)) throw IllegalMove("heuristic requested for unavailable cell " + to_string(m));
  return std::min(kMaxH, offense_value(board, m, mover) + offense_value(board, m, opponent(mover)));
}

double kang_line(const Board& board, Move m, Player p, int dir) {
  const Cell c = cell_of(p);
  const auto& d = kDirections[dir];
  int length = 1;
  int open_ends = 0;
  for (int sign : {1, -1}) {
    int x = m.x + sign * d[0], y = m.y + sign * d[1];
    while (Move{x, y}.in_bounds() && board.at(x, y) == c) {
      ++length;
      x += sign * d[0];
      y += sign * d[1];
    }
    if (Move{x, y}.in_bounds() && board.at(x, y) == Cell::Empty) ++open_ends;
  }
  if (open_ends == 2) return static_cast<double>(length * length);
  if (open_ends == 1) return (length / 2.0) * (length / 2.0);
  return 0.0;
}

double kang_heuristic(const Board& board, Move m) {
  if (!m.in_bounds() || !board.empty_at(m)) throw IllegalMove("heuristic requested for unavailable cell " + to_string(m));
  double sum = 0;
  for (int d = 0; d < kNumDirections; ++d) sum += kang_line(board, m, board.side_to_move(), d);
  return sum;
}

std::vector<MoveThreat> analyze_moves(const Board& board, Player mover) {
  std::vector<MoveThreat> out;
  const auto rows = candidate_rows(board);
  const Player opp = opponent(mover);
  for (int y = 0; y < kBoardSize; ++y) {
    for (unsigned bits = rows[y]; bits != 0; bits &= bits - 1) {
      MoveThreat t;
      t.move = Move{__builtin_ctz(bits), y};
      double own = 0, other = 0;
      for (int d = 0; d < kNumDirections; ++d) {
        if (const int id = offense_pattern(board, t.move, mover, d); id >= 0) {
          own += pattern_value(id);
          t.own_five |= id == 0;
          t.own_four |= is_four_class(id);
          t.own_three |= is_open_three_class(id);
        }
        if (const int id = offense_pattern(board, t.move, opp, d); id >= 0) {
          other += pattern_value(id);
          t.opp_five |= id == 0;
          t.opp_four |= is_four_class(id);
          t.opp_live_four |= id == 1;
          t.opp_three |= is_open_three_class(id);
        }
      }
      t.h = std::min(kMaxH, own + other);
      out.push_back(t);
    }
  }
  return out;
}

ThreatLists find_threats(const Board& board, Player mover) {
  auto moves = analyze_moves(board, mover);
  std::stable_sort(moves.begin(), moves.end(), [](const MoveThreat& a, const MoveThreat& b) { return a.h > b.h; });
  ThreatLists lists;
  for (const auto& t : moves) {
    if (t.own_four) lists.vcf_moves.push_back(t.move);
    if (t.own_three) lists.vct_moves.push_back(t.move);
    if (t.opp_four || t.opp_three) lists.block_moves.push_back(t.move);
  }
  return lists;
}

}  // namespace uctadp
