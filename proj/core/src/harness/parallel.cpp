#include "bridge/harness/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bridge::harness {

std::size_t worker_count(std::size_t tasks) {
    std::size_t limit = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BRIDGE_THREADS")) {
        try {
            const long value = std::stol(env);
            if (value >= 1) limit = static_cast<std::size_t>(value);
        } catch (const std::exception&) {
            // unparsable values leave the default in place
        }
    }
    return std::max<std::size_t>(1, std::min(limit, tasks));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t workers = worker_count(count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace bridge::harness
