#ifndef SEGQC_NN_GRADCHECK_HPP
#define SEGQC_NN_GRADCHECK_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "segqc/nn/losses.hpp"
#include "segqc/nn/network.hpp"

namespace segqc::nn {

// Central finite differences against analytic gradients, double precision.
// A failed check is a report, not a crash.
struct GradCheckReport {
    double tolerance = 1e-4;
    double max_rel_error = 0.0;
    std::size_t checks = 0;
    std::string worst_location;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;

    bool passed() const { return max_rel_error <= tolerance; }

    void record(const std::string& location, double analytic, double numeric) {
        // Hybrid relative error: a 1e-6 floor keeps noise-level gradients
        // from dominating the report.
        const double denom = std::max({1e-6, std::abs(analytic), std::abs(numeric)});
        const double err = std::abs(analytic - numeric) / denom;
        ++checks;
        if (err > max_rel_error) {
            max_rel_error = err;
            worst_location = location;
            worst_analytic = analytic;
            worst_numeric = numeric;
        }
    }
};

enum class CheckLoss { weighted_sum, mse, gdl, mse_plus_gdl };

namespace detail {

// Fixed random projection so that arbitrary network fragments reduce to a
// smooth scalar objective.
inline std::vector<double> projection_coefficients(std::size_t count, std::uint64_t seed) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<double> c(count);
    for (double& v : c)
        v = rng.uniform(-1.0, 1.0);
    return c;
}

inline LossValue<double> evaluate_check_loss(CheckLoss kind, const Tensor4<double>& y,
                                             const Tensor4<double>& target,
                                             const std::vector<double>& projection,
                                             bool include_background) {
    switch (kind) {
        case CheckLoss::weighted_sum: {
            LossValue<double> out;
            out.grad = Tensor4<double>(y.n, y.c, y.h, y.w);
            for (std::size_t i = 0; i < y.v.size(); ++i) {
                out.value += projection[i] * y.v[i];
                out.grad.v[i] = projection[i];
            }
            return out;
        }
        case CheckLoss::mse:
            return mse_loss(y, target);
        case CheckLoss::gdl:
            return generalized_dice_loss(y, target, include_background);
        case CheckLoss::mse_plus_gdl: {
            LossValue<double> a = mse_loss(y, target);
            LossValue<double> b = generalized_dice_loss(y, target, include_background);
            a.value += b.value;
            for (std::size_t i = 0; i < a.grad.v.size(); ++i)
                a.grad.v[i] += b.grad.v[i];
            return a;
        }
    }
    throw config_error("unknown check loss");
}

// Evenly spaced sample of array indices; 0 means check everything.
inline std::vector<std::size_t> sample_indices(std::size_t size, std::size_t max_checks) {
    std::vector<std::size_t> idx;
    if (max_checks == 0 || size <= max_checks) {
        idx.resize(size);
        for (std::size_t i = 0; i < size; ++i) idx[i] = i;
        return idx;
    }
    idx.reserve(max_checks);
    for (std::size_t k = 0; k < max_checks; ++k)
        idx.push_back(k * size / max_checks);
    return idx;
}

} // namespace detail

// Verifies parameter and input gradients of a network fragment under the
// chosen objective. The forward pass runs in train mode with a re-seeded
// random source per evaluation, so dropout masks are identical across the
// +h / -h evaluations. Parameters are restored afterwards.
template <typename LossEval>
GradCheckReport gradient_check_custom(Network<double>& net, const Tensor4<double>& input,
                                      LossEval&& loss_of, double tolerance, std::uint64_t seed,
                                      std::size_t max_checks_per_array = 0,
                                      double h_base = 1e-5) {
    GradCheckReport report;
    report.tolerance = tolerance;

    const std::vector<LayerParams<double>> snapshot = net.params;

    // Analytic pass.
    std::vector<LayerParams<double>> grads;
    Tensor4<double> input_grad;
    {
        Rng rng(seed);
        ForwardTrace<double> trace;
        Tensor4<double> y = net.forward(input, RunMode::train, &rng, &trace);
        LossValue<double> loss = loss_of(y);
        input_grad = net.backward(trace, loss.grad, grads);
    }

    auto evaluate = [&](const Tensor4<double>& x) {
        Rng rng(seed);
        Tensor4<double> y = net.forward(x, RunMode::train, &rng, nullptr);
        return loss_of(y).value;
    };

    auto check_array = [&](std::vector<double>& theta, const std::vector<double>& analytic,
                           const std::string& label) {
        for (std::size_t i : detail::sample_indices(theta.size(), max_checks_per_array)) {
            const double saved = theta[i];
            const double h = h_base * std::max(1.0, std::abs(saved));
            theta[i] = saved + h;
            const double up = evaluate(input);
            theta[i] = saved - h;
            const double down = evaluate(input);
            theta[i] = saved;
            report.record(label + "[" + std::to_string(i) + "]", analytic[i],
                          (up - down) / (2.0 * h));
        }
    };

    for (std::size_t l = 0; l < net.specs.size(); ++l) {
        if (!net.specs[l].has_parameters()) continue;
        const std::string prefix =
            "layer" + std::to_string(l) + ":" + layer_kind_name(net.specs[l].kind);
        check_array(net.params[l].weight, grads[l].weight, prefix + ".weight");
        check_array(net.params[l].bias, grads[l].bias, prefix + ".bias");
    }

    // Input gradients exercise the full backward chain.
    Tensor4<double> x = input;
    for (std::size_t i : detail::sample_indices(x.v.size(), max_checks_per_array)) {
        const double saved = x.v[i];
        const double h = h_base * std::max(1.0, std::abs(saved));
        x.v[i] = saved + h;
        const double up = evaluate(x);
        x.v[i] = saved - h;
        const double down = evaluate(x);
        x.v[i] = saved;
        report.record("input[" + std::to_string(i) + "]", input_grad.v[i],
                      (up - down) / (2.0 * h));
    }

    net.params = snapshot;
    return report;
}

inline GradCheckReport gradient_check(Network<double>& net, const Tensor4<double>& input,
                                      CheckLoss loss_kind, const Tensor4<double>& target,
                                      double tolerance, std::uint64_t seed,
                                      std::size_t max_checks_per_array = 0,
                                      bool include_background = true, double h_base = 1e-5) {
    std::vector<double> projection;
    if (loss_kind == CheckLoss::weighted_sum) {
        // Probe forward only to size the projection; restore the parameters
        // so batchnorm running statistics are unaffected.
        const std::vector<LayerParams<double>> snapshot = net.params;
        Rng probe(seed);
        Tensor4<double> y = net.forward(input, RunMode::train, &probe, nullptr);
        projection = detail::projection_coefficients(y.v.size(), seed);
        net.params = snapshot;
    }
    auto loss_of = [&](const Tensor4<double>& y) {
        return detail::evaluate_check_loss(loss_kind, y, target, projection, include_background);
    };
    return gradient_check_custom(net, input, loss_of, tolerance, seed, max_checks_per_array,
                                 h_base);
}

// Direct finite-difference check of a loss gradient with respect to the
// prediction tensor.
inline GradCheckReport gradient_check_loss(CheckLoss kind, Tensor4<double> pred,
                                           const Tensor4<double>& target, double tolerance,
                                           bool include_background = true) {
    GradCheckReport report;
    report.tolerance = tolerance;
    const std::vector<double> none;
    LossValue<double> base = detail::evaluate_check_loss(kind, pred, target, none, include_background);
    for (std::size_t i = 0; i < pred.v.size(); ++i) {
        const double saved = pred.v[i];
        const double h = 1e-5 * std::max(1.0, std::abs(saved));
        pred.v[i] = saved + h;
        const double up = detail::evaluate_check_loss(kind, pred, target, none, include_background).value;
        pred.v[i] = saved - h;
        const double down = detail::evaluate_check_loss(kind, pred, target, none, include_background).value;
        pred.v[i] = saved;
        report.record("pred[" + std::to_string(i) + "]", base.grad.v[i], (up - down) / (2.0 * h));
    }
    return report;
}

} // namespace segqc::nn

#endif
