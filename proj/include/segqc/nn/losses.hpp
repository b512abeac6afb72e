#ifndef SEGQC_NN_LOSSES_HPP
#define SEGQC_NN_LOSSES_HPP

#include <cstddef>
#include <vector>

#include "segqc/nn/tensor.hpp"
#include "segqc/util/errors.hpp"

namespace segqc::nn {

template <typename T>
struct LossValue {
    T value = T(0);
    Tensor4<T> grad; // d loss / d pred
};

// Mean over all elements of the squared difference.
template <typename T>
LossValue<T> mse_loss(const Tensor4<T>& pred, const Tensor4<T>& target) {
    require_same_shape(pred, target, "mse_loss");
    LossValue<T> out;
    out.grad = Tensor4<T>(pred.n, pred.c, pred.h, pred.w);
    const T inv_count = T(1) / static_cast<T>(pred.v.size());
    T sum = T(0);
    for (std::size_t i = 0; i < pred.v.size(); ++i) {
        const T d = pred.v[i] - target.v[i];
        sum += d * d;
        out.grad.v[i] = T(2) * d * inv_count;
    }
    out.value = sum * inv_count;
    return out;
}

// Generalized Dice loss over the whole batch:
//   GDL = 1 - 2 * (sum_l w_l sum_n r_ln p_ln) / (sum_l w_l sum_n (r_ln + p_ln))
//   w_l = 1 / (sum_n r_ln)^2
// Class weights and the global denominator carry a 1e-6 regularizer so absent
// classes get a large-but-finite weight instead of a division by zero. With
// include_background=false, class 0 is dropped from both sums.
template <typename T>
LossValue<T> generalized_dice_loss(const Tensor4<T>& pred, const Tensor4<T>& target,
                                   bool include_background = true) {
    require_same_shape(pred, target, "generalized_dice_loss");
    const T reg = static_cast<T>(1e-6);
    const int first_class = include_background ? 0 : 1;
    const std::size_t plane = static_cast<std::size_t>(pred.h) * pred.w;

    std::vector<T> weight(static_cast<std::size_t>(pred.c), T(0));
    T numer = T(0); // sum_l w_l sum_n r p
    T denom = T(0); // sum_l w_l sum_n (r + p)
    for (int c = first_class; c < pred.c; ++c) {
        T r_sum = T(0), rp_sum = T(0), p_sum = T(0);
        for (int n = 0; n < pred.n; ++n) {
            const T* rp = &target.at(n, c, 0, 0);
            const T* pp = &pred.at(n, c, 0, 0);
            for (std::size_t i = 0; i < plane; ++i) {
                r_sum += rp[i];
                p_sum += pp[i];
                rp_sum += rp[i] * pp[i];
            }
        }
        const T w = T(1) / (r_sum * r_sum + reg);
        weight[static_cast<std::size_t>(c)] = w;
        numer += w * rp_sum;
        denom += w * (r_sum + p_sum);
    }
    const T denom_reg = denom + reg;

    LossValue<T> out;
    out.value = T(1) - T(2) * numer / denom_reg;
    out.grad = Tensor4<T>(pred.n, pred.c, pred.h, pred.w);
    // d/dp_ln = -2 (w_l r_ln denom_reg - numer w_l) / denom_reg^2
    const T inv_d2 = T(1) / (denom_reg * denom_reg);
    for (int c = first_class; c < pred.c; ++c) {
        const T w = weight[static_cast<std::size_t>(c)];
        for (int n = 0; n < pred.n; ++n) {
            const T* rp = &target.at(n, c, 0, 0);
            T* gp = &out.grad.at(n, c, 0, 0);
            for (std::size_t i = 0; i < plane; ++i)
                gp[i] = T(-2) * w * (rp[i] * denom_reg - numer) * inv_d2;
        }
    }
    return out;
}

} // namespace segqc::nn

#endif
