#pragma once

#include <cstdint>

namespace pqtopk {

/// Caps the OpenMP worker pool used by all parallel kernels. n == 0 restores the default.
void set_num_threads(int n);

/// Worker count the next parallel region will use.
int num_threads();

/// Hardware concurrency as reported by the OpenMP runtime.
int max_threads();

/// Total physical memory, or 0 if it cannot be determined.
std::uint64_t physical_memory_bytes();

/// 75% of physical memory (8 GiB when detection fails).
std::uint64_t default_memory_budget();

/// Scoped override of the worker count.
class ThreadScope {
public:
    explicit ThreadScope(int n);
    ~ThreadScope();
    ThreadScope(const ThreadScope&) = delete;
    ThreadScope& operator=(const ThreadScope&) = delete;

private:
    int previous_;
};

} // namespace pqtopk
