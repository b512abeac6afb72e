#ifndef SEGQC_NN_TENSOR_HPP
#define SEGQC_NN_TENSOR_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "segqc/util/errors.hpp"

namespace segqc::nn {

// Dense NCHW tensor. The engine is templated on the scalar type: float for
// training, double for gradient checks and oracles.
template <typename T>
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          v(static_cast<std::size_t>(n_) * c_ * h_ * w_, T(0)) {}

    std::size_t size() const { return v.size(); }

    T& at(int i, int j, int y, int x) {
        return v[((static_cast<std::size_t>(i) * c + j) * h + y) * w + x];
    }
    const T& at(int i, int j, int y, int x) const {
        return v[((static_cast<std::size_t>(i) * c + j) * h + y) * w + x];
    }

    bool same_shape(const Tensor4& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    std::string shape_string() const {
        return std::to_string(n) + "x" + std::to_string(c) + "x" +
               std::to_string(h) + "x" + std::to_string(w);
    }

    template <typename U>
    Tensor4<U> cast() const {
        Tensor4<U> out(n, c, h, w);
        for (std::size_t i = 0; i < v.size(); ++i)
            out.v[i] = static_cast<U>(v[i]);
        return out;
    }
};

template <typename T>
inline void require_same_shape(const Tensor4<T>& a, const Tensor4<T>& b, const char* where) {
    if (!a.same_shape(b))
        throw config_error(std::string(where) + ": shape mismatch " + a.shape_string() +
                           " vs " + b.shape_string());
}

} // namespace segqc::nn

#endif
