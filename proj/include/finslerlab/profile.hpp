#pragma once

#include <functional>
#include <vector>

#include "finslerlab/errors.hpp"

namespace fin {

/// Profile g(x2) of a rotational metric g^2(x2)<,> on the cylinder.
/// Either the closed-form sphere profile or a Hermite table produced by
/// solving h' = c1(h) for a generating curve c1 of a surface of revolution.
class Profile {
public:
    /// Sphere-of-revolution profile, g(t) = 2 e^t / (1 + e^{2t}) = sech(t).
    static Profile sphere();

    /// Hermite-interpolated profile on [lo,hi] with samples g_i and slopes dg_i.
    static Profile table(double lo, double hi, std::vector<double> g, std::vector<double> dg);

    double g(double t) const;
    double dg(double t) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool isSphere() const { return kind_ == Kind::Sphere; }

private:
    enum class Kind { Sphere, Table };
    Kind kind_ = Kind::Sphere;
    double lo_ = -1e9, hi_ = 1e9;
    std::vector<double> gv_, dgv_;
    double dt_ = 0.0;
};

struct RevolutionProfile {
    Profile profile;              ///< induced g = c1 o h
    double lo = 0.0, hi = 0.0;    ///< domain interval I
    double maxCheckError = 0.0;   ///< max |g'(t) - c1'(h) c1(h)| consistency residual
};

/// Solves h' = c1(h), h(t0) = h0 by RK4 on [span_lo, span_hi] and returns the
/// induced rotational profile g = c1 o h. Throws BlowUp if h leaves [j_lo, j_hi].
RevolutionProfile profileOde(const std::function<double(double)>& c1, double h0, double t0,
                             double span_lo, double span_hi, double j_lo, double j_hi,
                             double tol = 1e-10);

}  // namespace fin
