#include "pqtopk/parallel.hpp"

#include <omp.h>
#include <unistd.h>

namespace pqtopk {

void set_num_threads(int n) {
    omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
}

int num_threads() { return omp_get_max_threads(); }

int max_threads() { return omp_get_num_procs(); }

std::uint64_t physical_memory_bytes() {
    const long pages = sysconf(_SC_PHYS_PAGES);
    const long page_size = sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || page_size <= 0) return 0;
    return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page_size);
}

std::uint64_t default_memory_budget() {
    const auto total = physical_memory_bytes();
    if (total == 0) return std::uint64_t{8} << 30;
    return total / 4 * 3;
}

ThreadScope::ThreadScope(int n) : previous_(num_threads()) { set_num_threads(n); }

ThreadScope::~ThreadScope() { set_num_threads(previous_); }

} // namespace pqtopk
