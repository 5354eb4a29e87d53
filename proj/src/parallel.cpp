#include "fpd/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace fpd {

namespace {
thread_local bool g_in_parallel_region = false;
} // namespace

int thread_budget() {
    static const int budget = [] {
        const char* env = std::getenv("FPD_THREADS");
        long v = 0;
        if (env && *env)
            v = std::strtol(env, nullptr, 10);
        if (v <= 0)
            v = static_cast<long>(std::thread::hardware_concurrency());
        return static_cast<int>(std::max(1l, v));
    }();
    return budget;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    if (n <= 0)
        return;
    const int workers = g_in_parallel_region ? 1 : std::min<std::int64_t>(thread_budget(), n);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t begin = w * chunk;
        const std::int64_t end = std::min(n, begin + chunk);
        threads.emplace_back([&, w, begin, end] {
            g_in_parallel_region = true;
            try {
                for (std::int64_t i = begin; i < end; ++i)
                    fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace fpd
