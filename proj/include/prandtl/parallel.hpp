#pragma once

#include <cstddef>
#include <functional>

namespace prandtl {

// Worker-count control. 0 = auto (all hardware threads). The serial reference
// path is nthreads == 1; results are identical because callers write per-index
// slots and reduce serially afterwards.
void set_threads(int n);
int threads();

void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace prandtl
