#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace mtw {

inline unsigned default_thread_count() {
    if (const char* env = std::getenv("MTW_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 512) return unsigned(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

// Runs fn(shard_index) for shard_index in [0, shards); results must be combined
// by the caller in shard order so the outcome is scheduling-independent.
inline void parallel_shards(unsigned shards, const std::function<void(unsigned)>& fn,
                            unsigned threads = 0) {
    if (threads == 0) threads = default_thread_count();
    if (threads <= 1 || shards <= 1) {
        for (unsigned s = 0; s < shards; ++s) fn(s);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<unsigned> next{0};
    for (unsigned t = 0; t < std::min(threads, shards); ++t)
        pool.emplace_back([&] {
            for (;;) {
                unsigned s = next.fetch_add(1);
                if (s >= shards) return;
                fn(s);
            }
        });
    for (auto& th : pool) th.join();
}

// SplitMix64: deterministic, identical across platforms.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

}  // namespace mtw
