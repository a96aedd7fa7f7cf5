#pragma once

// Chunked parallel-for over index ranges. Results must not depend on the
// chunking: simulator rows own per-index RNG streams and model predictions
// are pure, so parallel and serial runs agree bit-exactly. The CLI's
// --threads flag caps the worker count.

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace rfq {

void set_max_threads(int n);
int max_threads();

template <typename F>
void parallel_for(std::size_t n, F body) { // body(begin, end)
    const int workers = std::max(1, std::min<int>(max_threads(), static_cast<int>(n)));
    if (workers == 1 || n < 2048) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace rfq
