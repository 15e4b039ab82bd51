#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace treespace {

/// Worker count: the explicit request if given, else TREESPACE_THREADS, else 1.
inline unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt) {
    if (requested && *requested > 0) {
        return *requested;
    }
    if (const char* env = std::getenv("TREESPACE_THREADS")) {
        try {
            long value = std::stol(env);
            if (value > 0) {
                return static_cast<unsigned>(value);
            }
        } catch (const std::exception&) {
        }
    }
    return 1;
}

/// Runs body(begin, end, worker) over contiguous chunks of [0, count). The
/// first exception thrown by any worker is rethrown on the caller's thread.
template <typename Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        body(std::size_t{0}, count, 0u);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        std::size_t begin = std::min(count, w * chunk);
        std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, begin, end, w] {
            try {
                body(begin, end, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace treespace
