#ifndef TRUSTDYN_CONFIG_HPP_
#define TRUSTDYN_CONFIG_HPP_

// Plain-text key=value configuration. '#' starts a comment; blank lines are
// ignored; keys are case-sensitive.

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "trustdyn/game.hpp"

namespace trustdyn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues parse_key_values(std::istream& in, std::string_view source = "<stream>");
KeyValues load_key_values(const std::string& path);

inline constexpr std::string_view kGameParamKeys[] = {
    "b_u", "b_c", "c", "v", "mu", "eps", "p_T", "p_D", "theta_T", "theta_D", "r"};

bool is_game_param_key(std::string_view key);

// Strict numeric parsing: the whole token must be consumed.
double parse_real(std::string_view key, std::string_view text);
long long parse_integer(std::string_view key, std::string_view text);

// Sets one GameParams field; throws ConfigError for unknown keys or
// malformed values (thresholds and r must be integers).
void set_game_param(GameParams& params, std::string_view key, std::string_view value);
double get_game_param(const GameParams& params, std::string_view key);

// Applies every GameParams key present in `kv` on top of `base`. Keys that
// are not GameParams fields are left for the caller. Validates the result.
GameParams game_params_from(const KeyValues& kv, GameParams base = {});

std::string to_key_values(const GameParams& params);

}  // namespace trustdyn

#endif  // TRUSTDYN_CONFIG_HPP_
