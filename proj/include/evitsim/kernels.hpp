#pragma once

#include <vector>

#include "evitsim/graph.hpp"
#include "evitsim/tensor.hpp"
#include "evitsim/weights.hpp"

namespace evitsim {

// Floating-point reference semantics. These are the production float kernels
// (OpenMP over output elements, fixed inner summation order); the serial
// second implementations used as test oracles live in serial_ref.hpp.

// Cross-correlation with zero padding; weight layout [out][in/groups][k][k].
FloatTensor conv2d_ref(const FloatTensor& x, const std::vector<double>& w,
                       const std::vector<double>& bias, const LayerDesc& desc);

double apply_activation(double v, Activation a);
FloatTensor activation_ref(const FloatTensor& x, Activation kind);

// Returns (w', b') such that conv(x; w', b') == BN(conv(x; w, b)).
void fold_batchnorm(std::vector<double>& w, std::vector<double>& bias,
                    const std::vector<double>& gamma, const std::vector<double>& beta,
                    const std::vector<double>& mean, const std::vector<double>& var, double eps,
                    int64_t out_channels);

// Q, K, V are n x d (shape (1,1,n,d)). Right-associated evaluation:
// Z = ReLU(K)^T V, k_rowsum_j = sum_t ReLU(K)_tj,
// O_t = (ReLU(Q_t) Z) / (ReLU(Q_t) k_rowsum); zero divisor => zero row.
FloatTensor relu_linear_attention_ref(const FloatTensor& q, const FloatTensor& k,
                                      const FloatTensor& v);

// Calibration hooks: max |value| observed per MSA intermediate.
struct MsaTrace {
    double qkv = 0;
    std::vector<double> tok;  // per scale, post-aggregation tokens
    std::vector<double> z;    // per scale
    std::vector<double> ks;   // per scale
    double attn = 0;          // concatenated attention output
};

FloatTensor multi_scale_msa_ref(const FloatTensor& x, const LayerDesc& desc,
                                const LayerWeightsF& w, MsaTrace* trace = nullptr);

double tensor_max_abs(const FloatTensor& t);

// Float forward pass over the whole graph (residual edges and ResidualAdd
// layers applied); returns every layer's post-activation output.
std::vector<FloatTensor> run_float_network(const NetworkGraph& g, const NetWeightsF& w,
                                           const FloatTensor& input,
                                           std::vector<MsaTrace>* traces = nullptr);

}  // namespace evitsim
