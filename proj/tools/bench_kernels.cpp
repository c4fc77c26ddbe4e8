// Compares the OpenMP kernels against the serial reference implementations.
#include <chrono>
#include <cmath>
#include <cstdio>

#include "evitsim/kernels.hpp"
#include "evitsim/serial_ref.hpp"
#include "evitsim/tensor.hpp"

using namespace evitsim;
using clk = std::chrono::steady_clock;

namespace {

double ms_since(clk::time_point t0) {
    return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

double max_abs_diff(const FloatTensor& a, const FloatTensor& b) {
    double m = 0;
    for (size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::fabs(a.data[i] - b.data[i]));
    return m;
}

void bench_conv(const char* label, const LayerDesc& d, TensorShape in, int reps) {
    Rng rng(42);
    FloatTensor x = random_tensor(in, rng);
    FloatTensor w({d.out_channels, d.in_channels / d.groups, d.kernel, d.kernel});
    for (auto& v : w.data) v = rng.uniform(-0.5, 0.5);
    std::vector<double> bias(static_cast<size_t>(d.out_channels), 0.01);

    FloatTensor ref = serial_ref::conv2d(x, w.data, bias, d);
    FloatTensor par = conv2d_ref(x, w.data, bias, d);
    const double err = max_abs_diff(ref, par);

    auto t0 = clk::now();
    for (int i = 0; i < reps; ++i) par = conv2d_ref(x, w.data, bias, d);
    const double par_ms = ms_since(t0) / reps;
    t0 = clk::now();
    for (int i = 0; i < reps; ++i) ref = serial_ref::conv2d(x, w.data, bias, d);
    const double ser_ms = ms_since(t0) / reps;

    std::printf("%-28s serial %8.2f ms  parallel %8.2f ms  speedup %5.2fx  max|diff| %g\n",
                label, ser_ms, par_ms, ser_ms / par_ms, err);
}

void bench_attention(int64_t n, int64_t d, int reps) {
    Rng rng(7);
    TensorShape s{1, 1, n, d};
    FloatTensor q = random_tensor(s, rng), k = random_tensor(s, rng), v = random_tensor(s, rng);

    FloatTensor right = relu_linear_attention_ref(q, k, v);
    FloatTensor left = serial_ref::attention_left(q, k, v);
    const double err = max_abs_diff(right, left);

    auto t0 = clk::now();
    for (int i = 0; i < reps; ++i) right = relu_linear_attention_ref(q, k, v);
    const double right_ms = ms_since(t0) / reps;
    t0 = clk::now();
    for (int i = 0; i < reps; ++i) left = serial_ref::attention_left(q, k, v);
    const double left_ms = ms_since(t0) / reps;

    std::printf("attention n=%-5lld d=%-3lld      left %8.2f ms     right %8.2f ms  speedup %5.2fx  max|diff| %g\n",
                static_cast<long long>(n), static_cast<long long>(d), left_ms, right_ms,
                left_ms / right_ms, err);
}

}  // namespace

int main() {
    LayerDesc pw{.name = "pw", .kind = LayerKind::PWConv, .in_channels = 128,
                 .out_channels = 512};
    bench_conv("pointwise 128->512 28x28", pw, {1, 128, 28, 28}, 5);

    LayerDesc dw{.name = "dw", .kind = LayerKind::DWConv, .kernel = 3, .stride = 1,
                 .padding = 1, .in_channels = 256, .out_channels = 256, .groups = 256};
    bench_conv("depthwise 256 k3 56x56", dw, {1, 256, 56, 56}, 5);

    LayerDesc gc{.name = "gc", .kind = LayerKind::GenericConv, .kernel = 3, .stride = 2,
                 .padding = 1, .in_channels = 3, .out_channels = 32};
    bench_conv("generic 3->32 k3s2 224x224", gc, {1, 3, 224, 224}, 5);

    bench_attention(784, 16, 5);
    bench_attention(196, 32, 20);
    return 0;
}
