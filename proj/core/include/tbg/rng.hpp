#pragma once

#include <cstdint>
#include <string_view>

namespace tbg {

// stable stream seed from (base, module, index); splitmix64 over an FNV-1a tag hash
std::uint64_t derive_seed(std::uint64_t base, std::string_view module, std::uint64_t index);

}  // namespace tbg
