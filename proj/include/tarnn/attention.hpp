#pragma once

#include <cstddef>
#include <random>

#include "tarnn/tensor.hpp"

namespace tarnn {

/// Trainable parameters of the dual-level attention stack. `width` is the RNN
/// output width; `d_model` the visit-embedding size the feature weights live in.
struct AttentionParams {
    Tensor w_alpha; // [width]
    Tensor b_alpha; // scalar
    Tensor W_beta;  // [d_model x width]
    Tensor b_beta;  // [d_model]
};

AttentionParams init_attention_params(std::size_t width, std::size_t d_model,
                                      std::mt19937_64& rng);

/// Visit-level weights: softmax over k_j = w_alpha . h_j + b_alpha.
Tensor visit_attention(const Tensor& h, const AttentionParams& p);

/// Feature-level weights: per visit, softmax over tanh(W_beta h_j + b_beta).
Tensor feature_attention(const Tensor& h, const AttentionParams& p);

/// Context vector c = sum_j alpha[j] * (beta[j] (.) z[j]).
Tensor context_vector(const Tensor& alpha, const Tensor& beta, const Tensor& z);

} // namespace tarnn
