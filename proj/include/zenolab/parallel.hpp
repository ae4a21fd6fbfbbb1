#ifndef ZENOLAB_PARALLEL_HPP
#define ZENOLAB_PARALLEL_HPP

#include <cstdlib>
#include <thread>
#include <vector>

namespace zeno::par {

/// Worker count used for an ensemble run.  A request of 0 means "auto":
/// hardware concurrency, optionally capped by the ZENOLAB_THREADS
/// environment variable.  An explicit request is honoured as given.
inline unsigned resolve_workers(unsigned requested)
{
    if (requested > 0) return requested;
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("ZENOLAB_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0 && static_cast<unsigned long>(cap) < n)
            n = static_cast<unsigned>(cap);
    }
    return n;
}

/// Run fn(i) for i in [0, n) on the given number of workers, splitting
/// the index range into contiguous blocks.  fn must only touch state
/// owned by index i; the partition carries no ordering guarantees.
template <typename Fn>
void parallel_indexed(std::size_t n, unsigned workers, Fn&& fn)
{
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t base = n / workers;
    const std::size_t extra = n % workers;
    std::size_t begin = 0;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        const std::size_t end = begin + len;
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
        begin = end;
    }
    for (auto& t : pool) t.join();
}

}  // namespace zeno::par

#endif
