#include "hypcmc/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

namespace hypcmc {

int worker_count() {
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("HYPCMC_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) workers = std::min(workers, cap);
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return workers;
}

std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(std::size_t n) {
    const std::size_t workers = static_cast<std::size_t>(worker_count());
    const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, n / 256 + 1));
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t c = 0; c < chunks; ++c) out.emplace_back(n * c / chunks, n * (c + 1) / chunks);
    return out;
}

void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    const auto ranges = chunk_ranges(n);
    if (ranges.size() == 1) {
        body(0, ranges[0].first, ranges[0].second);
        return;
    }
    std::vector<std::exception_ptr> errors(ranges.size());
    {
        std::vector<std::jthread> threads;
        for (std::size_t c = 0; c < ranges.size(); ++c) {
            threads.emplace_back([&, c] {
                try {
                    body(c, ranges[c].first, ranges[c].second);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace hypcmc
