#include "finslerlab/katok.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace fin {

double ConeSet::margin(const Vec2& x, const Vec2& eta) const {
    double fg = norm(eta) / profile.g(x.y);
    if (!(fg > 0)) return -1e300;
    double g0a = 1.0 / std::cosh(a);
    return std::min(a - std::abs(x.y), eta.x / fg - g0a);
}

namespace {

struct CotState {
    Vec2 x, eta;
};

using GradFn = std::function<void(const Vec2&, const Vec2&, Vec2&, Vec2&)>;

CotState flowRK4(const GradFn& grad, CotState s, double T, double dt,
                 const std::function<void(const CotState&)>& observe = nullptr) {
    long n = long(std::ceil(T / dt - 1e-9));
    double h = T / double(n);
    auto rhs = [&](const CotState& q) {
        Vec2 dHdx, dHdeta;
        grad(q.x, q.eta, dHdx, dHdeta);
        return CotState{dHdeta, -dHdx};
    };
    for (long i = 0; i < n; ++i) {
        CotState k1 = rhs(s);
        CotState k2 = rhs({s.x + k1.x * (0.5 * h), s.eta + k1.eta * (0.5 * h)});
        CotState k3 = rhs({s.x + k2.x * (0.5 * h), s.eta + k2.eta * (0.5 * h)});
        CotState k4 = rhs({s.x + k3.x * h, s.eta + k3.eta * h});
        s.x += (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6.0);
        s.eta += (k1.eta + k2.eta * 2.0 + k3.eta * 2.0 + k4.eta) * (h / 6.0);
        if (observe) observe(s);
    }
    return s;
}

double phaseDist(const CotState& a, const CotState& b, double period1) {
    double dx1 = std::remainder(a.x.x - b.x.x, period1);
    return std::sqrt(dx1 * dx1 + (a.x.y - b.x.y) * (a.x.y - b.x.y) + norm2(a.eta - b.eta));
}

}  // namespace

KatokCheckReport checkInvarianceAndPeriod(const Metric& kz, double a0, double a1, int samples,
                                          std::uint64_t seed, double dt) {
    const auto* info = kz.katokInfo();
    if (!info) throw ChartMismatchError("katok checks require a Katok-Ziller metric");
    if (samples < 100) throw ValidationError("need at least 100 samples");
    const Profile& prof = *info->profile;

    ConeSet coneA0{a0, prof}, coneA1{a1, prof};

    GradFn gradMixed = [&](const Vec2& x, const Vec2& eta, Vec2& dHdx, Vec2& dHdeta) {
        kz.dualGrad(x, eta, dHdx, dHdeta);
    };
    GradFn gradRot = [&](const Vec2& x, const Vec2& eta, Vec2& dHdx, Vec2& dHdeta) {
        double g = prof.g(x.y), dg = prof.dg(x.y);
        double n = norm(eta);
        dHdx = {0.0, -dg * n / (g * g)};
        dHdeta = eta / (n * g);
    };
    // flow of psi alone, recovered as (H_{alpha,beta} - alpha F_g)/beta
    GradFn gradPsi = [&](const Vec2& x, const Vec2& eta, Vec2& dHdx, Vec2& dHdeta) {
        if (info->beta == 0.0) throw ValidationError("translation flow needs beta != 0");
        Vec2 mx, me, rx, re;
        kz.dualGrad(x, eta, mx, me);
        gradRot(x, eta, rx, re);
        dHdx = (mx - rx * info->alpha) / info->beta;
        dHdeta = (me - re * info->alpha) / info->beta;
    };

    KatokCheckReport rep;
    rep.minMarginA0 = 1e300;
    rep.minMarginA1 = 1e300;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double g0a0 = 1.0 / std::cosh(a0);
    double g0a1 = 1.0 / std::cosh(a1);
    const double period1 = 2 * M_PI;

    for (int i = 0; i < samples; ++i) {
        bool inA0 = i % 2 == 0;
        // draw on {F_g = 1}: x2 in the band, eta1 in the cone range
        double x2, eta1;
        if (inA0) {
            x2 = (uni(rng) * 2 - 1) * a0 * 0.98;
            double g = prof.g(x2);
            eta1 = g0a0 + (g - g0a0) * uni(rng);
        } else {
            // shell M_{a1} - M_{a0}: either |x2| in (a0, a1) or eta1 below g0(a0)
            x2 = (uni(rng) * 2 - 1) * a1 * 0.98;
            double g = prof.g(x2);
            double hi = std::min(g, std::abs(x2) > a0 ? g : g0a0 - 1e-6);
            eta1 = g0a1 + (hi - g0a1) * uni(rng);
        }
        double g = prof.g(x2);
        double eta2 = std::sqrt(std::max(0.0, g * g - eta1 * eta1)) * (uni(rng) < 0.5 ? -1 : 1);
        CotState s0{{uni(rng) * period1, x2}, {eta1, eta2}};

        KatokCheckSample smp;
        smp.x0 = s0.x;
        smp.eta0 = s0.eta;
        smp.inA0 = inA0;

        if (inA0) {
            CotState r1 = flowRK4(gradRot, s0, 2 * M_PI, dt);
            smp.returnErrorRot = phaseDist(r1, s0, period1);
            CotState r2 = flowRK4(gradPsi, s0, 2 * M_PI, dt);
            smp.returnErrorTrans = phaseDist(r2, s0, period1);
        }

        double fg0 = norm(s0.eta) / prof.g(s0.x.y);
        double m0 = coneA0.margin(s0.x, s0.eta);
        double minM0 = m0, minM1 = coneA1.margin(s0.x, s0.eta);
        double maxFgD = 0.0, maxE1D = 0.0;
        flowRK4(gradMixed, s0, 4 * M_PI, dt, [&](const CotState& q) {
            minM0 = std::min(minM0, coneA0.margin(q.x, q.eta));
            minM1 = std::min(minM1, coneA1.margin(q.x, q.eta));
            double fg = norm(q.eta) / prof.g(q.x.y);
            maxFgD = std::max(maxFgD, std::abs(fg - fg0) / fg0);
            maxE1D = std::max(maxE1D, std::abs(q.eta.x - s0.eta.x));
        });
        smp.minMarginA0 = minM0;
        smp.minMarginA1 = minM1;
        smp.fgDrift = maxFgD;
        smp.eta1Drift = maxE1D;

        rep.maxReturnErrorRot = std::max(rep.maxReturnErrorRot, smp.returnErrorRot);
        rep.maxReturnErrorTrans = std::max(rep.maxReturnErrorTrans, smp.returnErrorTrans);
        if (inA0)
            rep.minMarginA0 = std::min(rep.minMarginA0, smp.minMarginA0);
        else if (m0 < -1e-9 && minM0 > 1e-6)
            ++rep.shellLeaks;  // shell sample entered the inner cone
        rep.minMarginA1 = std::min(rep.minMarginA1, smp.minMarginA1);
        rep.maxFgDrift = std::max(rep.maxFgDrift, smp.fgDrift);
        rep.maxEta1Drift = std::max(rep.maxEta1Drift, smp.eta1Drift);
        rep.samples.push_back(smp);
    }
    return rep;
}

PsiPlateauReport checkPsiPlateaus(const Metric& kz, double a0, double a1, double b, int samples,
                                  std::uint64_t seed) {
    const auto* info = kz.katokInfo();
    if (!info) throw ChartMismatchError("katok checks require a Katok-Ziller metric");
    if (info->beta == 0.0) throw ValidationError("plateau check needs beta != 0");
    const Profile& prof = *info->profile;
    PsiPlateauReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ConeSet coneA1{a1, prof};
    double g0a0 = 1.0 / std::cosh(a0);
    double g0a1 = 1.0 / std::cosh(a1);
    for (int i = 0; i < samples; ++i) {
        bool inner = i % 2 == 0;
        double x2, eta1;
        if (inner) {
            x2 = (uni(rng) * 2 - 1) * a0 * 0.98;
            double g = prof.g(x2);
            eta1 = g0a0 + (g - g0a0) * uni(rng);
        } else {
            if (uni(rng) < 0.5) {
                x2 = (a1 + (b + 0.3 - a1) * uni(rng) + 1e-3) * (uni(rng) < 0.5 ? -1 : 1);
                eta1 = (uni(rng) * 2 - 1) * prof.g(x2) * 0.98;
            } else {
                x2 = (uni(rng) * 2 - 1) * a1;
                double cap = std::min(prof.g(x2), g0a1);
                eta1 = (uni(rng) * 2 - 1) * cap * 0.98;  // below the fiber cutoff
            }
        }
        double g = prof.g(x2);
        double eta2 = std::sqrt(std::max(0.0, g * g - eta1 * eta1)) * (uni(rng) < 0.5 ? -1 : 1);
        Vec2 x{uni(rng) * 2 * M_PI, x2};
        double r = 0.25 + 3.0 * uni(rng);  // exercise fiber homogeneity
        Vec2 eta{r * eta1, r * eta2};
        if (!inner && coneA1.contains(x, eta)) continue;
        double fg = norm(eta) / g;
        double psi = (kz.dualF(x, eta) - info->alpha * fg) / info->beta;
        if (inner)
            rep.maxInnerResidual = std::max(rep.maxInnerResidual, std::abs(psi - eta.x));
        else
            rep.maxOuterResidual = std::max(rep.maxOuterResidual, std::abs(psi));
        ++rep.samplesChecked;
    }
    return rep;
}

namespace {

class ReversibilizedMetric final : public Metric {
public:
    explicit ReversibilizedMetric(MetricPtr base) : base_(std::move(base)) {
        if (base_->chart() != Chart::Cylinder)
            throw ChartMismatchError("reversibilization acts on cylinder duals");
    }
    MetricKind kind() const override { return base_->kind(); }
    Chart chart() const override { return Chart::Cylinder; }
    std::string describe() const override { return "reversibilized " + base_->describe(); }
    bool reversible() const override { return true; }

    double dualF(const Vec2& x, const Vec2& eta) const override {
        return eta.x >= 0 ? base_->dualF(x, eta) : base_->dualF(x, -eta);
    }
    void dualGrad(const Vec2& x, const Vec2& eta, Vec2& dHdx, Vec2& dHdeta) const override {
        if (eta.x >= 0) {
            base_->dualGrad(x, eta, dHdx, dHdeta);
        } else {
            base_->dualGrad(x, -eta, dHdx, dHdeta);
            dHdeta = -dHdeta;
        }
    }
    double F(const Vec2& x, const Vec2& v) const override {
        if (v.x == 0.0 && v.y == 0.0) return 0.0;
        return supportFromDual(*this, x, v);
    }
    const KatokZillerInfo* katokInfo() const override { return base_->katokInfo(); }

private:
    MetricPtr base_;
};

}  // namespace

MetricPtr reversibilize(MetricPtr kz) { return std::make_shared<ReversibilizedMetric>(std::move(kz)); }

}  // namespace fin
