#include "finslerlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fin {

namespace {
constexpr double kFdStep = 1e-6;

void requireFinite(const Vec2& x, const Vec2& v) {
    if (!finite(x) || !finite(v)) throw NonFiniteError("non-finite tangent vector");
}
}  // namespace

double mollifierStep(double u) {
    auto phi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    double a = phi(u), b = phi(1.0 - u);
    return a / (a + b);
}

Vec2 Metric::Fx(const Vec2& x, const Vec2& v) const {
    double h = kFdStep;
    return {(F({x.x + h, x.y}, v) - F({x.x - h, x.y}, v)) / (2 * h),
            (F({x.x, x.y + h}, v) - F({x.x, x.y - h}, v)) / (2 * h)};
}

Vec2 Metric::Fv(const Vec2& x, const Vec2& v) const {
    double h = kFdStep * std::max(1.0, norm(v));
    return {(F(x, {v.x + h, v.y}) - F(x, {v.x - h, v.y})) / (2 * h),
            (F(x, {v.x, v.y + h}) - F(x, {v.x, v.y - h})) / (2 * h)};
}

Vec2 Metric::legendre(const Vec2& x, const Vec2& v) const {
    requireFinite(x, v);
    if (v.x == 0.0 && v.y == 0.0) throw ZeroVelocityError("legendre at the zero section");
    auto L = [&](const Vec2& w) { double f = F(x, w); return 0.5 * f * f; };
    double h = kFdStep * std::max(1.0, norm(v));
    return {(L({v.x + h, v.y}) - L({v.x - h, v.y})) / (2 * h),
            (L({v.x, v.y + h}) - L({v.x, v.y - h})) / (2 * h)};
}

Vec2 Metric::elAccel(const Vec2&, const Vec2&) const {
    throw ChartMismatchError("Euler-Lagrange acceleration is only defined for torus-chart metrics");
}

double Metric::dualF(const Vec2&, const Vec2&) const {
    throw ChartMismatchError("dual norm is only provided by cylinder-chart metrics");
}

void Metric::dualGrad(const Vec2&, const Vec2&, Vec2&, Vec2&) const {
    throw ChartMismatchError("dual norm is only provided by cylinder-chart metrics");
}

Vec2 Metric::covectorToVelocity(const Vec2& x, const Vec2& eta) const {
    Vec2 dHdx, dHdeta;
    dualGrad(x, eta, dHdx, dHdeta);
    return dHdeta * dualF(x, eta);
}

double supportFromDual(const Metric& m, const Vec2& x, const Vec2& v) {
    double n = norm(v);
    if (n == 0.0) return 0.0;
    auto h = [&](double phi) {
        Vec2 e{std::cos(phi), std::sin(phi)};
        return dot(e, v) / m.dualF(x, e);
    };
    int K = 64;
    int best = 0;
    double hbest = -1e300;
    for (int k = 0; k < K; ++k) {
        double val = h(2 * M_PI * k / K);
        if (val > hbest) { hbest = val; best = k; }
    }
    double lo = 2 * M_PI * (best - 1) / K, hi = 2 * M_PI * (best + 1) / K;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = h(c), fd = h(d);
    for (int it = 0; it < 80; ++it) {
        if (fc > fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo);
            fc = h(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo);
            fd = h(d);
        }
    }
    double val = std::max(fc, fd);
    if (!(val > 0.0)) throw DegenerateMetricError("support function not positive");
    return val;
}

Vec2 Metric::velocityToCovector(const Vec2& x, const Vec2& v) const {
    if (chart() == Chart::Torus) return legendre(x, v);
    if (v.x == 0.0 && v.y == 0.0) throw ZeroVelocityError("velocityToCovector at the zero section");
    // damped Newton on G(eta) = covectorToVelocity(eta) - v with FD Jacobian
    Vec2 eta = v;  // decent start for near-Riemannian duals
    {
        double f = dualF(x, eta);
        if (f > 0) eta = eta / f * norm(v);
    }
    auto G = [&](const Vec2& e) { return covectorToVelocity(x, e) - v; };
    Vec2 r = G(eta);
    for (int it = 0; it < 50; ++it) {
        if (norm(r) <= 1e-10 * std::max(1.0, norm(v))) return eta;
        double h = 1e-7 * std::max(1.0, norm(eta));
        Vec2 gx = (G({eta.x + h, eta.y}) - G({eta.x - h, eta.y})) / (2 * h);
        Vec2 gy = (G({eta.x, eta.y + h}) - G({eta.x, eta.y - h})) / (2 * h);
        double det = gx.x * gy.y - gy.x * gx.y;
        if (std::abs(det) < 1e-14) break;
        Vec2 step{(-r.x * gy.y + r.y * gy.x) / det, (-gx.x * r.y + gx.y * r.x) / det};
        double lambda = 1.0;
        for (int k = 0; k < 30; ++k) {
            Vec2 cand = eta + step * lambda;
            Vec2 rc = G(cand);
            if (norm(rc) < norm(r)) {
                eta = cand;
                r = rc;
                break;
            }
            lambda *= 0.5;
        }
    }
    if (norm(r) > 1e-8 * std::max(1.0, norm(v)))
        throw NoConvergenceError("inverse Legendre transform did not converge");
    return eta;
}

// ---------------------------------------------------------------------------

class FlatMetric final : public Metric {
public:
    MetricKind kind() const override { return MetricKind::Flat; }
    Chart chart() const override { return Chart::Torus; }
    std::string describe() const override { return "flat"; }
    bool reversible() const override { return true; }

    double F(const Vec2& x, const Vec2& v) const override {
        requireFinite(x, v);
        return norm(v);
    }
    Vec2 Fx(const Vec2&, const Vec2&) const override { return {0, 0}; }
    Vec2 Fv(const Vec2&, const Vec2& v) const override { return normalized(v); }
    Vec2 legendre(const Vec2&, const Vec2& v) const override {
        if (v.x == 0.0 && v.y == 0.0) throw ZeroVelocityError("legendre at the zero section");
        return v;
    }
    Vec2 elAccel(const Vec2&, const Vec2&) const override { return {0, 0}; }
};

class RandersMetric final : public Metric {
public:
    explicit RandersMetric(Vec2 b) : b_(b) {
        if (norm(b) >= 1.0) throw DegenerateMetricError("Randers drift must satisfy |b| < 1");
    }
    MetricKind kind() const override { return MetricKind::Randers; }
    Chart chart() const override { return Chart::Torus; }
    std::string describe() const override {
        std::ostringstream os;
        os << "randers b=(" << b_.x << "," << b_.y << ")";
        return os.str();
    }
    bool reversible() const override { return b_.x == 0.0 && b_.y == 0.0; }

    double F(const Vec2& x, const Vec2& v) const override {
        requireFinite(x, v);
        return norm(v) + dot(b_, v);
    }
    Vec2 Fx(const Vec2&, const Vec2&) const override { return {0, 0}; }
    Vec2 Fv(const Vec2&, const Vec2& v) const override { return normalized(v) + b_; }
    Vec2 legendre(const Vec2& x, const Vec2& v) const override {
        if (v.x == 0.0 && v.y == 0.0) throw ZeroVelocityError("legendre at the zero section");
        return Fv(x, v) * F(x, v);
    }
    Vec2 elAccel(const Vec2&, const Vec2&) const override { return {0, 0}; }

private:
    Vec2 b_;
};

class ConformalMetric final : public Metric {
public:
    ConformalMetric(double base, std::vector<FourierTerm> terms)
        : base_(base), terms_(std::move(terms)) {
        // positivity probe on a fine grid
        double gmin = 1e300;
        for (int i = 0; i < 97; ++i)
            for (int j = 0; j < 97; ++j) gmin = std::min(gmin, g({i / 97.0, j / 97.0}));
        if (gmin <= 0.0) throw DegenerateMetricError("conformal factor is not positive");
    }
    MetricKind kind() const override { return MetricKind::Conformal; }
    Chart chart() const override { return Chart::Torus; }
    std::string describe() const override {
        std::ostringstream os;
        os << "conformal base=" << base_ << " terms=" << terms_.size();
        return os.str();
    }
    bool reversible() const override { return true; }

    double g(const Vec2& x) const {
        double s = base_;
        for (const auto& t : terms_)
            s += t.amplitude * std::cos(2 * M_PI * (t.k1 * x.x + t.k2 * x.y) + t.phase);
        return s;
    }
    Vec2 gradg(const Vec2& x) const {
        Vec2 gr{0, 0};
        for (const auto& t : terms_) {
            double s = -t.amplitude * std::sin(2 * M_PI * (t.k1 * x.x + t.k2 * x.y) + t.phase) * 2 * M_PI;
            gr.x += s * t.k1;
            gr.y += s * t.k2;
        }
        return gr;
    }

    double F(const Vec2& x, const Vec2& v) const override {
        requireFinite(x, v);
        return g(x) * norm(v);
    }
    Vec2 Fx(const Vec2& x, const Vec2& v) const override { return gradg(x) * norm(v); }
    Vec2 Fv(const Vec2& x, const Vec2& v) const override { return normalized(v) * g(x); }
    Vec2 legendre(const Vec2& x, const Vec2& v) const override {
        if (v.x == 0.0 && v.y == 0.0) throw ZeroVelocityError("legendre at the zero section");
        double gg = g(x);
        return v * (gg * gg);
    }
    Vec2 elAccel(const Vec2& x, const Vec2& v) const override {
        double gg = g(x);
        Vec2 gr = gradg(x);
        return (gr * norm2(v) - v * (2.0 * dot(gr, v))) / gg;
    }

private:
    double base_;
    std::vector<FourierTerm> terms_;
};

class RotationalMetric final : public Metric {
public:
    explicit RotationalMetric(Profile p) : p_(std::move(p)) {}
    MetricKind kind() const override { return MetricKind::Rotational; }
    Chart chart() const override { return Chart::Cylinder; }
    std::string describe() const override { return "rotational"; }
    bool reversible() const override { return true; }

    double F(const Vec2& x, const Vec2& v) const override {
        requireFinite(x, v);
        return p_.g(x.y) * norm(v);
    }
    Vec2 Fx(const Vec2& x, const Vec2& v) const override { return {0.0, p_.dg(x.y) * norm(v)}; }
    Vec2 Fv(const Vec2& x, const Vec2& v) const override { return normalized(v) * p_.g(x.y); }
    Vec2 legendre(const Vec2& x, const Vec2& v) const override {
        if (v.x == 0.0 && v.y == 0.0) throw ZeroVelocityError("legendre at the zero section");
        double gg = p_.g(x.y);
        return v * (gg * gg);
    }
    double dualF(const Vec2& x, const Vec2& eta) const override { return norm(eta) / p_.g(x.y); }
    void dualGrad(const Vec2& x, const Vec2& eta, Vec2& dHdx, Vec2& dHdeta) const override {
        double gg = p_.g(x.y), n = norm(eta);
        dHdx = {0.0, -p_.dg(x.y) * n / (gg * gg)};
        dHdeta = eta / (n * gg);
    }
    const Profile& profile() const { return p_; }

private:
    Profile p_;
};

class KatokZillerMetric final : public Metric {
public:
    KatokZillerMetric(Profile p, double alpha, double beta, double a0, double a1, double b,
                      double chiWidth)
        : p_(std::move(p)), alpha_(alpha), beta_(beta), a0_(a0), a1_(a1), b_(b), cw_(chiWidth) {
        if (!(0 < a0 && a0 < a1 && a1 < b)) throw ValidationError("need 0 < a0 < a1 < b");
        if (alpha <= 0) throw ValidationError("alpha must be positive");
        f_hi_ = p_.g(a0_);  // f == 1 at and above this value of eta1/F_g
        f_lo_ = p_.g(a1_);  // f == 0 at and below
        // the fiber cutoff must still vanish where chi transitions; this needs
        // g decreasing past a1 up to b+chiWidth
        for (int i = 0; i <= 32; ++i) {
            double t = a1 + (b + cw_ - a1) * i / 32.0;
            if (p_.g(t) >= f_lo_ - 1e-12)
                throw ValidationError("profile must stay below g(a1) on (a1, b+chiWidth]");
        }
        checkConvexity();
    }
    MetricKind kind() const override { return MetricKind::KatokZiller; }
    Chart chart() const override { return Chart::Cylinder; }
    std::string describe() const override {
        std::ostringstream os;
        os << "katok-ziller alpha=" << alpha_ << " beta=" << beta_;
        return os.str();
    }
    bool reversible() const override { return beta_ == 0.0; }

    double chi(double x2) const {
        double a = std::abs(x2);
        if (a <= b_) return 1.0;
        if (a >= b_ + cw_) return 0.0;
        return 1.0 - mollifierStep((a - b_) / cw_);
    }
    double fcut(double t) const {
        if (t >= f_hi_) return 1.0;
        if (t <= f_lo_) return 0.0;
        return mollifierStep((t - f_lo_) / (f_hi_ - f_lo_));
    }
    double dfcut(double t) const {
        if (t >= f_hi_ || t <= f_lo_) return 0.0;
        double h = 1e-7 * (f_hi_ - f_lo_);
        return (fcut(t + h) - fcut(t - h)) / (2 * h);
    }
    double Fg(const Vec2& x, const Vec2& eta) const { return norm(eta) / p_.g(x.y); }
    double psi(const Vec2& x, const Vec2& eta) const {
        double c = chi(x.y);
        if (c == 0.0) return 0.0;
        double u = eta.x / Fg(x, eta);
        return c * fcut(u) * eta.x;
    }

    double dualF(const Vec2& x, const Vec2& eta) const override {
        return alpha_ * Fg(x, eta) + beta_ * psi(x, eta);
    }
    void dualGrad(const Vec2& x, const Vec2& eta, Vec2& dHdx, Vec2& dHdeta) const override {
        double gg = p_.g(x.y), dgg = p_.dg(x.y);
        double n = norm(eta);
        double fg = n / gg;
        // F_g part
        dHdx = {0.0, -dgg * n / (gg * gg)};
        dHdeta = eta / (n * gg);
        dHdx.y *= alpha_;
        dHdeta *= alpha_;
        if (beta_ != 0.0) {
            double c = chi(x.y);
            double u = eta.x / fg;  // = g * eta1 / |eta|
            double f = fcut(u);
            double df = dfcut(u);
            if (c != 0.0 && (f != 0.0 || df != 0.0)) {
                double u_e1 = gg * eta.y * eta.y / (n * n * n);
                double u_e2 = -gg * eta.x * eta.y / (n * n * n);
                double u_x2 = dgg * eta.x / n;
                // chi transitions only where f vanishes, so no chi' term
                dHdeta.x += beta_ * c * (f + df * u_e1 * eta.x);
                dHdeta.y += beta_ * c * df * u_e2 * eta.x;
                dHdx.y += beta_ * c * df * u_x2 * eta.x;
            }
        }
    }

    // primal norm as the support function of the dual unit ball
    double F(const Vec2& x, const Vec2& v) const override {
        requireFinite(x, v);
        if (v.x == 0.0 && v.y == 0.0) return 0.0;
        return supportFromDual(*this, x, v);
    }

    const KatokZillerInfo* katokInfo() const override {
        info_ = {alpha_, beta_, a0_, a1_, b_, &p_};
        return &info_;
    }

private:
    void checkConvexity() const {
        // smallest eigenvalue of the eta-Hessian of (F*)^2/2 on sampled covectors
        auto dual2 = [&](const Vec2& x, const Vec2& e) {
            double f = dualF(x, e);
            return 0.5 * f * f;
        };
        double h = 1e-5;
        for (int i = 0; i < 12; ++i) {
            for (int k = 0; k < 24; ++k) {
                Vec2 x{0.37, -b_ + (2 * b_) * i / 11.0};
                double phi = 2 * M_PI * k / 24.0;
                Vec2 e{std::cos(phi), std::sin(phi)};
                double dxx = (dual2(x, {e.x + h, e.y}) - 2 * dual2(x, e) + dual2(x, {e.x - h, e.y})) / (h * h);
                double dyy = (dual2(x, {e.x, e.y + h}) - 2 * dual2(x, e) + dual2(x, {e.x, e.y - h})) / (h * h);
                double dxy = (dual2(x, {e.x + h, e.y + h}) - dual2(x, {e.x + h, e.y - h}) -
                              dual2(x, {e.x - h, e.y + h}) + dual2(x, {e.x - h, e.y - h})) /
                             (4 * h * h);
                double tr = dxx + dyy, det = dxx * dyy - dxy * dxy;
                double lam = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4 * det)));
                if (!(lam > 0.0))
                    throw ConvexityLostError("dual energy lost fiber convexity; reduce |beta|");
            }
        }
    }

    Profile p_;
    double alpha_, beta_, a0_, a1_, b_, cw_;
    double f_hi_ = 1.0, f_lo_ = 0.0;
    mutable KatokZillerInfo info_;
};

// ---------------------------------------------------------------------------

MetricPtr makeFlat() { return std::make_shared<FlatMetric>(); }
MetricPtr makeRanders(Vec2 drift) { return std::make_shared<RandersMetric>(drift); }
MetricPtr makeConformal(double base, std::vector<FourierTerm> terms) {
    return std::make_shared<ConformalMetric>(base, std::move(terms));
}
MetricPtr makeRotational(Profile profile) {
    return std::make_shared<RotationalMetric>(std::move(profile));
}
MetricPtr makeKatokZiller(Profile profile, double alpha, double beta, double a0, double a1,
                          double b, double chiWidth) {
    return std::make_shared<KatokZillerMetric>(std::move(profile), alpha, beta, a0, a1, b,
                                               chiWidth);
}

std::vector<FourierTerm> bumpFourierTerms(double height, double sigma, int kmax,
                                          double tiltAmplitude, double tiltPhase) {
    // wrapped-Gaussian coefficients c_k = exp(-2 pi^2 sigma^2 k^2);
    // product bump at (1/2,1/2) expanded into cos(2 pi(k1 x1 + k2 x2) + phase)
    std::vector<double> c(kmax + 1);
    double peak1d = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        c[k] = std::exp(-2.0 * M_PI * M_PI * sigma * sigma * k * k);
        peak1d += (k == 0 ? 1.0 : 2.0) * c[k];
    }
    double scale = height / (peak1d * peak1d);
    std::vector<FourierTerm> terms;
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            double amp = scale * c[std::abs(k1)] * c[std::abs(k2)];
            // cos(2 pi (k1(x1-1/2) + k2(x2-1/2))) term
            terms.push_back({k1, k2, amp, -M_PI * (k1 + k2)});
        }
    }
    // the k1=k2=0 component goes into the base; report it as a zero-frequency term
    terms.push_back({0, 0, scale, 0.0});
    if (tiltAmplitude != 0.0) terms.push_back({1, 1, tiltAmplitude, tiltPhase});
    return terms;
}

EquivalenceConstants estimateCF(const Metric& m, int gridResolution, int angleResolution) {
    if (gridResolution < 16 || angleResolution < 16)
        throw ValidationError("estimateCF needs at least 16 points per period and per angle");
    double worst = 1.0;
    double x2lo = 0.0, x2hi = 1.0;
    if (m.chart() == Chart::Cylinder) { x2lo = -1.5; x2hi = 1.5; }
    for (int i = 0; i < gridResolution; ++i) {
        for (int j = 0; j <= gridResolution; ++j) {
            Vec2 x{m.period1() * i / gridResolution,
                   x2lo + (x2hi - x2lo) * j / gridResolution};
            for (int k = 0; k < angleResolution; ++k) {
                double phi = 2 * M_PI * k / angleResolution;
                double f = m.F(x, {std::cos(phi), std::sin(phi)});
                if (!(f > 0.0)) throw DegenerateMetricError("F <= 0 at a sample");
                worst = std::max(worst, std::max(f, 1.0 / f));
            }
        }
    }
    return {worst * 1.05, gridResolution};
}

}  // namespace fin
