#pragma once

#include <cstdint>
#include <string>

#include "config.hpp"
#include "io.hpp"

namespace tbgcli {

struct Context {
  json cfg;
  OutputSet& out;
  std::uint64_t seed;
  json summary = json::object();  // written as <sub>_summary.json when nonempty
};

void run_subcommand(const std::string& sub, Context& ctx);

}  // namespace tbgcli
