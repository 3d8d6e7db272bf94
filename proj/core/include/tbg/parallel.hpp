#pragma once

#include <functional>

namespace tbg {

void set_threads(int n);
int threads();

// runs f(i) for i in [0, n); each index is handled exactly once, results are written by
// the caller into index-addressed storage
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace tbg
