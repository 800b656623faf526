#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "finslerlab/errors.hpp"
#include "finslerlab/profile.hpp"
#include "finslerlab/vec.hpp"

namespace fin {

enum class Chart { Torus, Cylinder };
enum class MetricKind { Flat, Randers, Conformal, Rotational, KatokZiller };

/// A point of the tangent bundle over the universal cover of the chart.
struct TangentVec {
    Vec2 x;  ///< lifted base point (chart units)
    Vec2 v;  ///< velocity
};

/// Sampled equivalence constant: (1/c_F)|v| <= F(x,v) <= c_F|v| on the samples,
/// inflated by a 5% safety factor.
struct EquivalenceConstants {
    double cF = 1.0;
    int gridResolution = 0;
};

struct FourierTerm {
    int k1 = 0, k2 = 0;
    double amplitude = 0.0;
    double phase = 0.0;
};

/// Finsler norm F on the tangent (or cotangent) bundle of the chart.
/// Immutable after construction; all evaluations are pure.
class Metric {
public:
    virtual ~Metric() = default;

    virtual MetricKind kind() const = 0;
    virtual Chart chart() const = 0;
    virtual std::string describe() const = 0;
    /// Period of x1 (1 on the torus chart, 2*pi on the cylinder chart).
    virtual double period1() const { return chart() == Chart::Torus ? 1.0 : 2.0 * M_PI; }
    virtual bool reversible() const = 0;

    /// F(x,v); positive for v != 0, positively 1-homogeneous in v.
    virtual double F(const Vec2& x, const Vec2& v) const = 0;
    double F(const TangentVec& w) const { return F(w.x, w.v); }

    /// dF/dx and dF/dv away from the zero section.
    virtual Vec2 Fx(const Vec2& x, const Vec2& v) const;
    virtual Vec2 Fv(const Vec2& x, const Vec2& v) const;

    /// Fiber derivative of L = F^2/2, i.e. the momentum conjugate to v.
    /// Default is a central finite difference of F^2/2 with step 1e-6; models
    /// with cheap closed forms override it.
    virtual Vec2 legendre(const Vec2& x, const Vec2& v) const;
    Vec2 legendre(const TangentVec& w) const { return legendre(w.x, w.v); }

    /// Acceleration of the Euler-Lagrange flow of F^2/2 (torus-chart models).
    virtual Vec2 elAccel(const Vec2& x, const Vec2& v) const;

    /// Dual norm F*(x,eta) and its gradient (cylinder-chart models).
    virtual double dualF(const Vec2& x, const Vec2& eta) const;
    virtual void dualGrad(const Vec2& x, const Vec2& eta, Vec2& dHdx, Vec2& dHdeta) const;

    /// Velocity of the covector eta under the Legendre transform of F*^2/2.
    Vec2 covectorToVelocity(const Vec2& x, const Vec2& eta) const;
    /// Inverse map, damped Newton (tol 1e-10, <= 50 iterations) on cylinder charts.
    Vec2 velocityToCovector(const Vec2& x, const Vec2& v) const;

    struct KatokZillerInfo {
        double alpha = 1.0, beta = 0.0;
        double a0 = 0.0, a1 = 0.0, b = 0.0;
        const Profile* profile = nullptr;
    };
    virtual const KatokZillerInfo* katokInfo() const { return nullptr; }
};

/// Primal norm as the support function of the dual unit ball {F* = 1}
/// (coarse angular scan plus golden section).
double supportFromDual(const Metric& m, const Vec2& x, const Vec2& v);

using MetricPtr = std::shared_ptr<const Metric>;

MetricPtr makeFlat();
MetricPtr makeRanders(Vec2 drift);
MetricPtr makeConformal(double base, std::vector<FourierTerm> terms);
MetricPtr makeRotational(Profile profile);
/// Katok-Ziller dual norm alpha*F_g + beta*psi on the cylinder; the cutoff in
/// x2 transitions on [b, b+chiWidth], the fiber cutoff on [g(a1), g(a0)].
MetricPtr makeKatokZiller(Profile profile, double alpha, double beta, double a0, double a1,
                          double b, double chiWidth = 0.1);

/// Conformal factor 1 + height * periodic bump at (0.5,0.5) (+ optional tilt
/// term breaking the reflection symmetries), as a truncated Fourier series.
std::vector<FourierTerm> bumpFourierTerms(double height, double sigma, int kmax,
                                          double tiltAmplitude = 0.0, double tiltPhase = 0.0);

/// max over samples of max(F/|v|, |v|/F) on |v|=1, times 1.05.
EquivalenceConstants estimateCF(const Metric& m, int gridResolution = 24, int angleResolution = 64);

/// Smoothstep built from the exp(-1/t) mollifier: 0 for u<=0, 1 for u>=1, C-infinity.
double mollifierStep(double u);

}  // namespace fin
