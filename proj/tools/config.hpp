#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tbg/disorder.hpp"
#include "tbg/potential.hpp"

namespace tbgcli {

using nlohmann::json;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& subcommands();

// full default RunConfig of a subcommand: model, numerics, disorder (null when unused), task, seed, output_dir
json default_config(const std::string& sub);

// overlay onto base; every key of over must exist in base with a compatible type
json merge_strict(const json& base, const json& over, const std::string& where = "");

json load_config_file(const std::string& path);

// "--key value" style override; value parsed against the type of the target entry
void apply_override(json& cfg, const std::string& pointer, const std::string& text);

double get_double(const json& cfg, const std::string& pointer);
int get_int(const json& cfg, const std::string& pointer);
bool get_bool(const json& cfg, const std::string& pointer);
tbg::cplx get_complex(const json& cfg, const std::string& pointer);
std::vector<double> get_doubles(const json& cfg, const std::string& pointer);
std::vector<int> get_ints(const json& cfg, const std::string& pointer);
// flat [lo1, hi1, lo2, hi2, ...]
std::vector<tbg::Interval> get_intervals(const json& cfg, const std::string& pointer);

tbg::PotentialSpec potential_from(const json& cfg);
tbg::DisorderConfig disorder_from(const json& cfg);

}  // namespace tbgcli
