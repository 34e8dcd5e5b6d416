#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "uctadp/adp.hpp"
#include "uctadp/agents.hpp"
#include "uctadp/search.hpp"

namespace uctadp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineConfig {
  SearchConfig search;
  TdConfig td;
  AgentKind agent = AgentKind::UctAdpPb;
  std::string model_path = "models/adp-12000.txt";
  std::string static_dir;
};

/// Applies one key=value setting. Throws ConfigError on an unknown key or bad value.
void apply_setting(EngineConfig& cfg, std::string_view key, std::string_view value);

/// key=value lines; blank lines and lines starting with '#' are ignored.
void apply_config_text(EngineConfig& cfg, std::string_view text);
void apply_config_file(EngineConfig& cfg, const std::string& path);

}  // namespace uctadp
