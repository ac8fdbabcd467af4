// quadrature.hpp — adaptive Gauss-Kronrod (G7,K15) panels over scalar- or
// tensor-valued integrands. Panels are refined by bisection and combined in
// a fixed order so repeated runs are bit-identical at fixed settings.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vcoup/core.hpp"

namespace vcoup::quad {

// Kronrod-15 abscissae on the positive half interval, Gauss-7 and
// Kronrod-15 weights. Node 0 is the midpoint.
inline constexpr double gk_nodes[8] = {
    0.000000000000000, 0.405845151377397, 0.741531185599394,
    0.949107912342759, 0.207784955007898, 0.586087235467691,
    0.864864423359769, 0.991455371120813};
inline constexpr double g7_w[8] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870, 0.0, 0.0, 0.0, 0.0};
inline constexpr double k15_w[8] = {
    0.209482141084728, 0.190350578064785, 0.140653259715525,
    0.063092092629979, 0.204432940075298, 0.169004726639267,
    0.104790010322250, 0.022935322010529};

struct Tolerance {
    double rel{1e-8};
    double abs{1e-14};
    int max_depth{28};
};

inline double norm_of(double x) { return std::abs(x); }
inline double norm_of(const complexd& x) { return std::abs(x); }
inline double norm_of(const Dyadic33& m) { return m.cwiseAbs().maxCoeff(); }

namespace detail {

// One G7/K15 panel on [a,b]. err receives |K15-G7|, scale the L1 magnitude
// of the panel.
template <class T, class F>
T gk15_panel(const F& f, double a, double b, double& err, double& scale) {
    const double mid = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    T y0 = f(mid);
    T k15 = k15_w[0] * y0;
    T g7 = g7_w[0] * y0;
    double absint = k15_w[0] * norm_of(y0);
    for (int i = 1; i < 8; ++i) {
        T yi = f(mid + h * gk_nodes[i]);
        T ymi = f(mid - h * gk_nodes[i]);
        T s = yi + ymi;
        k15 += k15_w[i] * s;
        if (g7_w[i] != 0.0) g7 += g7_w[i] * s;
        absint += k15_w[i] * (norm_of(yi) + norm_of(ymi));
    }
    k15 *= h;
    g7 *= h;
    err = norm_of(T(k15 - g7));
    scale = h * absint;
    return k15;
}

template <class T, class F>
void adapt(const F& f, double a, double b, const Tolerance& tol, int depth,
           double budget, T& acc, double& errace, double& scaleace) {
    double err = 0.0, scale = 0.0;
    T val = gk15_panel<T, F>(f, a, b, err, scale);
    if (err <= budget || depth >= tol.max_depth || !(b - a > 0.0)) {
        acc += val;
        errace += err;
        scaleace += scale;
        return;
    }
    const double mid = 0.5 * (a + b);
    adapt<T, F>(f, a, mid, tol, depth + 1, 0.5 * budget, acc, errace, scaleace);
    adapt<T, F>(f, mid, b, tol, depth + 1, 0.5 * budget, acc, errace, scaleace);
}

} // namespace detail

// Adaptive integral of f over [a,b]. `zero` supplies the additive identity
// of T. Throws ConvergenceError when the accumulated estimate exceeds the
// requested tolerance by more than an order of magnitude.
template <class T, class F>
T integrate(const F& f, double a, double b, T zero, const Tolerance& tol = {},
            double* err_out = nullptr) {
    double err0 = 0.0, scale0 = 0.0;
    detail::gk15_panel<T, F>(f, a, b, err0, scale0);
    const double budget = std::max(tol.abs, tol.rel * scale0);

    T acc = zero;
    double errace = 0.0, scaleace = 0.0;
    detail::adapt<T, F>(f, a, b, tol, 0, budget, acc, errace, scaleace);
    if (err_out) *err_out = errace;
    const double allowed =
        10.0 * std::max(tol.abs, tol.rel * std::max(scaleace, scale0));
    if (errace > allowed)
        throw ConvergenceError("quadrature did not reach requested tolerance",
                               errace);
    return acc;
}

// Split the axis at the given breakpoints and integrate each sub-interval
// adaptively, summing in order.
template <class T, class F>
T integrate_segments(const F& f, const std::vector<double>& breaks, T zero,
                     const Tolerance& tol = {}, double* err_out = nullptr) {
    T acc = zero;
    double errace = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double e = 0.0;
        acc += integrate<T>(f, breaks[i], breaks[i + 1], zero, tol, &e);
        errace += e;
    }
    if (err_out) *err_out = errace;
    return acc;
}

} // namespace vcoup::quad
