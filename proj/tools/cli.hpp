#pragma once

#include <string>
#include <vector>

namespace tbgcli {

// argv-style entry point; args[0] is the program name
int run(const std::vector<std::string>& args);

}  // namespace tbgcli
