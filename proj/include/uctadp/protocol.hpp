#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uctadp/config.hpp"

namespace uctadp {

inline constexpr const char* kAboutString = R"(name="uctadp", version="1.0", author="uctadp", country="-")";

/// Piskvork brain: one command line in, at most one response line out.
class ProtocolEngine {
 public:
  enum class Phase { Idle, Playing, LoadingBoard };

  /// `model` may be null when the configured agent does not need one.
  ProtocolEngine(EngineConfig cfg, const Mlp* model);

  /// Response to `line`, or nullopt for commands that expect none (INFO, END,
  /// lines inside BOARD).
  std::optional<std::string> handle(std::string_view line);

  /// Reads commands until END or end of input, writing and flushing each response.
  void run(std::istream& in, std::ostream& out);

  bool finished() const { return finished_; }
  Phase phase() const { return phase_; }
  const Board& board() const { return board_; }
  const std::map<std::string, std::string>& info() const { return info_; }

  /// Time cap for the next move: min(0.9 * timeout_turn, time_left / 20,
  /// configured time budget), or nullopt when none of them is known.
  std::optional<std::int64_t> turn_budget_ms() const;

 private:
  std::string engine_move();
  std::string finish_board();
  std::optional<std::int64_t> info_int(const std::string& key) const;

  EngineConfig cfg_;
  const Mlp* model_;
  Board board_;
  Phase phase_ = Phase::Idle;
  bool finished_ = false;
  std::map<std::string, std::string> info_;
  std::vector<Move> own_stones_, opp_stones_;
};

}  // namespace uctadp
