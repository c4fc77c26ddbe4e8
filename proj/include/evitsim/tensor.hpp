#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evitsim {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : SimError {
    using SimError::SimError;
};

// NCHW, batch fixed at 1 for inference.
struct TensorShape {
    int64_t batch = 1;
    int64_t channels = 1;
    int64_t height = 1;
    int64_t width = 1;

    int64_t numel() const { return batch * channels * height * width; }
    int64_t pixels() const { return height * width; }
    bool operator==(const TensorShape&) const = default;
    std::string str() const;
};

struct FloatTensor {
    TensorShape shape;
    std::vector<double> data;

    FloatTensor() = default;
    explicit FloatTensor(TensorShape s) : shape(s), data(static_cast<size_t>(s.numel()), 0.0) {}

    double& at(int64_t c, int64_t y, int64_t x) {
        return data[static_cast<size_t>((c * shape.height + y) * shape.width + x)];
    }
    double at(int64_t c, int64_t y, int64_t x) const {
        return data[static_cast<size_t>((c * shape.height + y) * shape.width + x)];
    }
};

struct QuantParams {
    double scale = 1.0;  // symmetric, zero_point fixed at 0
    int bit_width = 8;
    int zero_point = 0;
};

struct QuantTensor {
    TensorShape shape;
    std::vector<int8_t> data;
    QuantParams params;

    QuantTensor() = default;
    QuantTensor(TensorShape s, QuantParams p)
        : shape(s), data(static_cast<size_t>(s.numel()), 0), params(p) {}

    int8_t& at(int64_t c, int64_t y, int64_t x) {
        return data[static_cast<size_t>((c * shape.height + y) * shape.width + x)];
    }
    int8_t at(int64_t c, int64_t y, int64_t x) const {
        return data[static_cast<size_t>((c * shape.height + y) * shape.width + x)];
    }
};

// Deterministic RNG helpers. std::normal_distribution is implementation
// defined, so uniforms and gaussians are derived from raw mt19937_64 words.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    uint64_t next_u64() {
        // splitmix64
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Box-Muller
    double gaussian(double mean = 0.0, double stddev = 1.0);
    int64_t below(int64_t n) { return static_cast<int64_t>(next_u64() % static_cast<uint64_t>(n)); }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

FloatTensor random_tensor(TensorShape s, Rng& rng, double lo = -1.0, double hi = 1.0);

}  // namespace evitsim
