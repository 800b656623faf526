#pragma once

#include "finslerlab/metric.hpp"

namespace fin {

/// 8-point Gauss-Legendre nodes/weights on [0,1].
struct GL8 {
    static constexpr double x[8] = {0.0198550717512319, 0.1016667612931866, 0.2372337950418355,
                                    0.4082826787521751, 0.5917173212478249, 0.7627662049581645,
                                    0.8983332387068134, 0.9801449282487681};
    static constexpr double w[8] = {0.0506142681451881, 0.1111905172266872, 0.1568533229389436,
                                    0.1813418916891810, 0.1813418916891810, 0.1568533229389436,
                                    0.1111905172266872, 0.0506142681451881};
};

/// F-length of the straight segment from a to a+d.
inline double segmentLengthF(const Metric& m, const Vec2& a, const Vec2& d) {
    double L = 0.0;
    for (int k = 0; k < 8; ++k) L += GL8::w[k] * m.F(a + d * GL8::x[k], d);
    return L;
}

/// Gradient of segmentLengthF with respect to both endpoints (b = a + d).
inline void segmentLengthGrad(const Metric& m, const Vec2& a, const Vec2& b, Vec2& ga, Vec2& gb) {
    Vec2 d = b - a;
    ga = {0, 0};
    gb = {0, 0};
    for (int k = 0; k < 8; ++k) {
        double t = GL8::x[k], w = GL8::w[k];
        Vec2 p = a + d * t;
        Vec2 fx = m.Fx(p, d);
        Vec2 fv = m.Fv(p, d);
        ga += (fx * (1.0 - t) - fv) * w;
        gb += (fx * t + fv) * w;
    }
}

}  // namespace fin
