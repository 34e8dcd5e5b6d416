#include "uctadp/agents.hpp"

namespace uctadp {

const char* agent_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::Adp: return "adp";
    case AgentKind::UctAdp: return "uct-adp";
    case AgentKind::UctAdpPb: return "uct-adp-pb";
    case AgentKind::UctDummy: return "uct-dummy";
    case AgentKind::UctSim: return "uct-sim";
    case AgentKind::WeightedSum: return "weighted-sum";
  }
  return "?";
}

std::optional<AgentKind> parse_agent(std::string_view name) {
  for (AgentKind k : all_agents()) {
    if (name == agent_name(k)) return k;
  }
  return std::nullopt;
}

const std::vector<AgentKind>& all_agents() {
  static const std::vector<AgentKind> agents{AgentKind::Adp,      AgentKind::UctAdp, AgentKind::UctAdpPb,
                                             AgentKind::UctDummy, AgentKind::UctSim, AgentKind::WeightedSum};
  return agents;
}

bool agent_needs_model(AgentKind kind) {
  return kind == AgentKind::Adp || kind == AgentKind::UctAdp || kind == AgentKind::UctAdpPb ||
         kind == AgentKind::WeightedSum;
}

SearchConfig agent_config(AgentKind kind, const SearchConfig& base) {
  SearchConfig cfg = base;
  cfg.k2 = 0.0;
  switch (kind) {
    case AgentKind::Adp:
    case AgentKind::UctAdp: cfg.evaluator = EvaluatorKind::Adp; break;
    case AgentKind::UctAdpPb:
      cfg.evaluator = EvaluatorKind::Adp;
      cfg.k2 = base.k2;
      break;
    case AgentKind::UctDummy: cfg.evaluator = EvaluatorKind::Dummy; break;
    case AgentKind::UctSim: cfg.evaluator = EvaluatorKind::Simulation; break;
    case AgentKind::WeightedSum: cfg.evaluator = EvaluatorKind::WeightedSum; break;
  }
  return cfg;
}

Move agent_move(AgentKind kind, const Board& board, const SearchConfig& base, const Mlp* model) {
  if (board.is_terminal()) throw NoMoveAvailable("position is already decided");
  if (agent_needs_model(kind) && model == nullptr) throw std::invalid_argument("agent requires a model");
  if (kind == AgentKind::Adp) {
    Rng rng(base.seed);
    return greedy_move(*model, board, rng);
  }
  return search(board, agent_config(kind, base), model).best;
}

}  // namespace uctadp
