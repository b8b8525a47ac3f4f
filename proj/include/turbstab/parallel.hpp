#pragma once

#include <functional>

namespace turbstab {

/// Runs fn(i) for i in [0, n). Work items must write to disjoint slots;
/// callers reduce in index order, so results match any thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace turbstab
