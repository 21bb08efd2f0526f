#pragma once

#include <cstddef>
#include <functional>

namespace bargmann {

/// Worker count used by parallel_for. 0 restores the default (available cores).
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, count). Each index must write only its own output
/// slot; callers reduce afterwards in index order so results do not depend on
/// the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bargmann
