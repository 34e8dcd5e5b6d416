#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uctadp/board.hpp"

namespace uctadp {

inline constexpr int kNumPatterns = 32;
inline constexpr double kMaxH = 100000.0;
inline constexpr double kDecay = 0.90;
/// Smallest value of any four- or open-three-class pattern: 10^3 * 0.9^2.
inline constexpr double kThreatThreshold = 810.0;

enum class PatternClass : std::uint8_t { Open, HalfClosed };
enum class PatternFamily : std::uint8_t { Five, Four, OpenThree, Minor };

struct PatternInfo {
  int id;
  const char* ascii;  // '.' empty, 'X' stone, '|' edge or opponent
  const char* name;
  PatternClass cls;
  int length;  // L_open or L_hclose
  int decay;   // exponent of the decay factor
  PatternFamily family;
};

const std::array<PatternInfo, kNumPatterns>& pattern_catalog();

/// 10^L * 0.9^d for open patterns, 10^(L-1) * 0.9^d for half-closed ones.
double closed_form_value(PatternClass cls, int length, int decay);
/// Table lookup of closed_form_value for catalog entry `id`.
double pattern_value(int id);

inline bool is_four_class(int id) {
  const auto f = pattern_catalog()[id].family;
  return f == PatternFamily::Five || f == PatternFamily::Four;
}
inline bool is_open_three_class(int id) { return pattern_catalog()[id].family == PatternFamily::OpenThree; }

/// Tab-separated id, ascii, class, length, decay, value, name; one row per pattern.
std::string catalog_table();

using PatternCounts = std::array<int, kNumPatterns>;

/// A classified stone group inside one line segment; lo/hi are the local
/// positions of its first and last stone.
struct LineGroup {
  std::uint8_t id;
  std::uint8_t lo;
  std::uint8_t hi;
};

/// Groups found in a segment of `len` cells (5..15) bounded on both sides by an
/// edge or an opponent stone, where `mask` bit i marks an own stone at cell i.
/// Lone stones are not reported.
std::span<const LineGroup> classify_segment(int len, unsigned mask);

/// Builds the segment lookup table (about 0.1 s); later calls return at once.
void prepare_pattern_tables();

/// Pattern counts of `p` over all four directions.
PatternCounts scan_patterns(const Board& board, Player p);

/// Catalog id of the group `p` would own through `m` in direction `dir` after
/// placing there, or -1 for none. `m` must be empty.
int offense_pattern(const Board& board, Move m, Player p, int dir);
double offense_value(const Board& board, Move m, Player p);

/// Offense of `mover` at m plus offense of the opponent at m, capped at kMaxH.
/// Throws IllegalMove on an occupied or off-board cell.
double exp_heuristic(const Board& board, Move m, Player mover);

/// One line's term L_open^2 + (L_hclose/2)^2 for the run `p` would own through m.
double kang_line(const Board& board, Move m, Player p, int dir);
/// Sum of kang_line over the four directions for the side to move.
double kang_heuristic(const Board& board, Move m);

/// Threat summary of one candidate move.
struct MoveThreat {
  Move move;
  double h = 0;
  bool own_five = false;
  bool own_four = false;   // any four-class pattern, fives included
  bool own_three = false;  // open-three class
  bool opp_five = false;
  bool opp_four = false;
  bool opp_live_four = false;
  bool opp_three = false;
};

/// Every candidate move with its heuristic and threat flags, row-major.
std::vector<MoveThreat> analyze_moves(const Board& board, Player mover);

struct ThreatLists {
  std::vector<Move> vcf_moves;
  std::vector<Move> vct_moves;
  std::vector<Move> block_moves;
};

/// Candidate moves making a four (vcf), an open three (vct), or stopping an
/// opponent four or open three (block). Each list by descending exp_heuristic,
/// ties row-major.
ThreatLists find_threats(const Board& board, Player mover);

}  // namespace uctadp
