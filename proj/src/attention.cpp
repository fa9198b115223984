#include "tarnn/attention.hpp"

#include <cmath>

#include "tarnn/errors.hpp"

namespace tarnn {

AttentionParams init_attention_params(std::size_t width, std::size_t d_model,
                                      std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(width));
    std::uniform_real_distribution<double> dist(-bound, bound);
    AttentionParams p;
    p.w_alpha = Tensor::zeros({width}, true);
    for (double& v : p.w_alpha.mutable_values())
        v = dist(rng);
    p.b_alpha = Tensor::scalar(0.0, true);
    p.W_beta = Tensor::zeros({d_model, width}, true);
    for (double& v : p.W_beta.mutable_values())
        v = dist(rng);
    p.b_beta = Tensor::zeros({d_model}, true);
    return p;
}

Tensor visit_attention(const Tensor& h, const AttentionParams& p) {
    if (h.rank() != 2 || h.rows() == 0)
        throw DimensionError("visit_attention: expected non-empty [t x width] states, got " +
                             shape_str(h.shape()));
    const std::size_t t = h.rows();
    std::vector<Tensor> logits(t);
    for (std::size_t j = 0; j < t; ++j)
        logits[j] = add(dot(p.w_alpha, row(h, j)), p.b_alpha);
    return softmax(stack_scalars(logits));
}

Tensor feature_attention(const Tensor& h, const AttentionParams& p) {
    if (h.rank() != 2 || h.rows() == 0)
        throw DimensionError("feature_attention: expected non-empty [t x width] states, got " +
                             shape_str(h.shape()));
    const std::size_t t = h.rows();
    std::vector<Tensor> rows(t);
    for (std::size_t j = 0; j < t; ++j) {
        Tensor raw = tanh_act(add(matvec(p.W_beta, row(h, j)), p.b_beta));
        rows[j] = softmax(raw);
    }
    return stack_rows(rows);
}

Tensor context_vector(const Tensor& alpha, const Tensor& beta, const Tensor& z) {
    if (alpha.rank() != 1 || beta.rank() != 2 || z.rank() != 2 || alpha.numel() != beta.rows() ||
        beta.rows() != z.rows() || beta.cols() != z.cols())
        throw DimensionError("context_vector: inconsistent shapes alpha " +
                             shape_str(alpha.shape()) + ", beta " + shape_str(beta.shape()) +
                             ", z " + shape_str(z.shape()));
    const std::size_t t = z.rows();
    Tensor c = Tensor::zeros({z.cols()});
    for (std::size_t j = 0; j < t; ++j) {
        Tensor weighted = mul(mul(row(beta, j), row(z, j)), element(alpha, j));
        c = add(c, weighted);
    }
    return c;
}

} // namespace tarnn
