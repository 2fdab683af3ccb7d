#pragma once

#include <cstdint>
#include <future>
#include <stdexcept>
#include <thread>
#include <vector>

namespace gwish {

// splitmix64 step; used to derive independent sub-stream seeds from one
// master seed.  Stable across platforms by construction.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for logical sub-stream `index` of `master`.  Distinct indices give
// streams that never share state.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x51a9b2c3d4e5f607ULL));
}

// Kahan compensated accumulator; keeps Monte Carlo averages stable over
// hundreds of millions of terms.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Splits `n` items into `n_blocks` near-equal contiguous blocks and runs
// fn(block_index, block_count) for each, on up to `n_threads` threads.
// Callers must write per-block results into preallocated slots and reduce
// in block order afterwards: the final answer is then independent of the
// thread count, bit for bit.
template <class BlockFn>
void run_blocks(std::int64_t n, int n_blocks, int n_threads, BlockFn&& fn) {
    if (n_blocks < 1) throw std::invalid_argument("run_blocks: n_blocks must be >= 1");
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_blocks), n / n_blocks);
    for (int b = 0; b < static_cast<int>(n % n_blocks); ++b) counts[static_cast<std::size_t>(b)] += 1;

    if (n_threads <= 1) {
        for (int b = 0; b < n_blocks; ++b) fn(b, counts[static_cast<std::size_t>(b)]);
        return;
    }
    std::vector<std::future<void>> pending;
    pending.reserve(static_cast<std::size_t>(n_blocks));
    int in_flight_limit = n_threads;
    int next = 0;
    while (next < n_blocks) {
        while (next < n_blocks && static_cast<int>(pending.size()) < in_flight_limit) {
            int b = next++;
            std::int64_t c = counts[static_cast<std::size_t>(b)];
            pending.push_back(std::async(std::launch::async, [b, c, &fn] { fn(b, c); }));
        }
        for (auto& f : pending) f.get();
        pending.clear();
    }
}

}  // namespace gwish
