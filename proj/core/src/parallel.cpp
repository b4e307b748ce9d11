#include "wickwave/parallel.hpp"

namespace wickwave {

namespace {
std::atomic<int> g_workers{1};
}

int default_workers() { return g_workers.load(); }

void set_default_workers(int workers) { g_workers.store(std::max(workers, 1)); }

}  // namespace wickwave
