#include "trustdyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "trustdyn/csv.hpp"

namespace trustdyn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValues parse_key_values(std::istream& in, std::string_view source) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      std::ostringstream os;
      os << source << ":" << lineno << ": expected key=value";
      throw ConfigError(os.str());
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream os;
      os << source << ":" << lineno << ": empty key";
      throw ConfigError(os.str());
    }
    kv.insert_or_assign(std::string(key), std::string(value));
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_key_values(in, path);
}

bool is_game_param_key(std::string_view key) {
  return std::find(std::begin(kGameParamKeys), std::end(kGameParamKeys), key) !=
         std::end(kGameParamKeys);
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("malformed real for '" + std::string(key) + "': '" + std::string(text) +
                      "'");
  }
  return value;
}

long long parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  long long value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("expected an integer for '" + std::string(key) + "', got '" +
                      std::string(text) + "'");
  }
  return value;
}

void set_game_param(GameParams& p, std::string_view key, std::string_view value) {
  if (key == "b_u") p.b_u = parse_real(key, value);
  else if (key == "b_c") p.b_c = parse_real(key, value);
  else if (key == "c") p.c = parse_real(key, value);
  else if (key == "v") p.v = parse_real(key, value);
  else if (key == "mu") p.mu = parse_real(key, value);
  else if (key == "eps") p.eps = parse_real(key, value);
  else if (key == "p_T") p.p_T = parse_real(key, value);
  else if (key == "p_D") p.p_D = parse_real(key, value);
  else if (key == "theta_T") p.theta_T = static_cast<int>(parse_integer(key, value));
  else if (key == "theta_D") p.theta_D = static_cast<int>(parse_integer(key, value));
  else if (key == "r") p.r = static_cast<int>(parse_integer(key, value));
  else throw ConfigError("unknown game parameter: " + std::string(key));
}

double get_game_param(const GameParams& p, std::string_view key) {
  if (key == "b_u") return p.b_u;
  if (key == "b_c") return p.b_c;
  if (key == "c") return p.c;
  if (key == "v") return p.v;
  if (key == "mu") return p.mu;
  if (key == "eps") return p.eps;
  if (key == "p_T") return p.p_T;
  if (key == "p_D") return p.p_D;
  if (key == "theta_T") return p.theta_T;
  if (key == "theta_D") return p.theta_D;
  if (key == "r") return p.r;
  throw ConfigError("unknown game parameter: " + std::string(key));
}

GameParams game_params_from(const KeyValues& kv, GameParams base) {
  for (const auto& [key, value] : kv) {
    if (is_game_param_key(key)) set_game_param(base, key, value);
  }
  try {
    base.validate();
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  return base;
}

std::string to_key_values(const GameParams& p) {
  std::ostringstream os;
  for (auto key : kGameParamKeys) {
    os << key << "=" << format_real(get_game_param(p, key)) << "\n";
  }
  return os.str();
}

}  // namespace trustdyn
