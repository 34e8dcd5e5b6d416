#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uctadp/adp.hpp"
#include "uctadp/search.hpp"

namespace uctadp {

enum class AgentKind { Adp, UctAdp, UctAdpPb, UctDummy, UctSim, WeightedSum };

const char* agent_name(AgentKind kind);
/// Accepts adp, uct-adp, uct-adp-pb, uct-dummy, uct-sim, weighted-sum.
std::optional<AgentKind> parse_agent(std::string_view name);
const std::vector<AgentKind>& all_agents();

bool agent_needs_model(AgentKind kind);

/// `base` with the agent's evaluator; the progressive-bias weight is kept only
/// for uct-adp-pb and zeroed otherwise.
SearchConfig agent_config(AgentKind kind, const SearchConfig& base);

/// The agent's move for the side to move. `base.seed` seeds the search.
Move agent_move(AgentKind kind, const Board& board, const SearchConfig& base, const Mlp* model);

}  // namespace uctadp
