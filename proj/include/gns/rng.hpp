#pragma once

#include <cmath>
#include <cstdint>

namespace gns {

// Counter-based stream: draw i depends only on (key, i), so streams can be split
// across workers without changing results.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) { return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL)); }

class CounterRng {
public:
    explicit CounterRng(uint64_t key, uint64_t start = 0) : key_(mix64(key)), ctr_(start) {}

    uint64_t next() { return mix64(key_ + mix64(ctr_++)); }
    // uniform on (0,1)
    double uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    uint64_t counter() const { return ctr_; }

    // two independent standard normals (Box-Muller)
    void normal_pair(double& a, double& b) {
        double r = std::sqrt(-2.0 * std::log(uniform()));
        double t = 6.283185307179586477 * uniform();
        a = r * std::cos(t);
        b = r * std::sin(t);
    }

private:
    uint64_t key_;
    uint64_t ctr_;
};

} // namespace gns
