#include "finslerlab/flow.hpp"

#include <algorithm>
#include <cmath>

namespace fin {

namespace {

struct State4 {
    Vec2 x, w;  // w = velocity (torus) or momentum (cylinder)
    State4 operator+(const State4& o) const { return {x + o.x, w + o.w}; }
    State4 operator*(double s) const { return {x * s, w * s}; }
};

State4 rhsTangent(const Metric& m, const State4& s) {
    return {s.w, m.elAccel(s.x, s.w)};
}

State4 rhsCotangent(const Metric& m, const State4& s) {
    Vec2 dHdx, dHdeta;
    m.dualGrad(s.x, s.w, dHdx, dHdeta);
    return {dHdeta, -dHdx};
}

template <typename RHS>
State4 rk4Step(const RHS& f, const State4& s, double dt) {
    State4 k1 = f(s);
    State4 k2 = f(s + k1 * (0.5 * dt));
    State4 k3 = f(s + k2 * (0.5 * dt));
    State4 k4 = f(s + k3 * dt);
    return s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
}

}  // namespace

double OrbitSample::energyDrift() const {
    if (energyTrace.empty()) return 0.0;
    double e0 = energyTrace.front();
    double worst = 0.0;
    for (double e : energyTrace) worst = std::max(worst, std::abs(e - e0));
    return worst / std::abs(e0);
}

static OrbitSample integrateImpl(const Metric& m, State4 s, double t0, double T, double dt,
                                 int stride, bool cot) {
    if (!(dt > 0.0) || dt > 1e-2) throw ValidationError("need 0 < dt <= 1e-2");
    double nsteps = std::ceil(T / dt - 1e-9);
    if (nsteps > 1e7) throw ValidationError("T/dt exceeds the step budget 1e7");
    long n = long(nsteps);
    double h = T / double(n);

    OrbitSample o;
    o.cotangent = cot;
    o.times.reserve(size_t(n / stride) + 2);

    auto record = [&](double t, const State4& st) {
        o.times.push_back(t);
        if (cot) {
            Vec2 v = m.covectorToVelocity(st.x, st.w);
            o.states.push_back({st.x, v});
            o.momenta.push_back(st.w);
            double f = m.dualF(st.x, st.w);
            o.energyTrace.push_back(0.5 * f * f);
        } else {
            o.states.push_back({st.x, st.w});
            double f = m.F(st.x, st.w);
            o.energyTrace.push_back(0.5 * f * f);
        }
    };

    record(t0, s);
    for (long i = 0; i < n; ++i) {
        if (cot)
            s = rk4Step([&](const State4& q) { return rhsCotangent(m, q); }, s, h);
        else
            s = rk4Step([&](const State4& q) { return rhsTangent(m, q); }, s, h);
        if (!finite(s.x) || !finite(s.w)) throw NonFiniteError("orbit became non-finite");
        if ((i + 1) % stride == 0 || i + 1 == n) record(t0 + h * double(i + 1), s);
    }
    if (o.energyDrift() > 1e-4)
        throw StepRejectedError("relative energy drift above 1e-4; reduce dt");
    return o;
}

OrbitSample integrate(const Metric& m, const TangentVec& w0, double T, double dt, int stride) {
    if (!finite(w0.x) || !finite(w0.v)) throw NonFiniteError("non-finite initial condition");
    if (!(m.F(w0) > 0.0)) throw ZeroVelocityError("initial condition on the zero section");
    if (m.chart() == Chart::Torus) {
        return integrateImpl(m, {w0.x, w0.v}, 0.0, T, dt, stride, false);
    }
    Vec2 eta = m.velocityToCovector(w0.x, w0.v);
    return integrateImpl(m, {w0.x, eta}, 0.0, T, dt, stride, true);
}

OrbitSample integrateFrom(const Metric& m, const OrbitSample& o, double T, double dt, int stride) {
    if (o.states.empty()) throw ValidationError("empty orbit");
    State4 s;
    s.x = o.states.back().x;
    s.w = o.cotangent ? o.momenta.back() : o.states.back().v;
    return integrateImpl(m, s, o.times.back(), T, dt, stride, o.cotangent);
}

double orbitLengthF(const OrbitSample& o, const Metric& m) {
    static const double gl8x[8] = {0.0198550717512319, 0.1016667612931866, 0.2372337950418355,
                                   0.4082826787521751, 0.5917173212478249, 0.7627662049581645,
                                   0.8983332387068134, 0.9801449282487681};
    static const double gl8w[8] = {0.0506142681451881, 0.1111905172266872, 0.1568533229389436,
                                   0.1813418916891810, 0.1813418916891810, 0.1568533229389436,
                                   0.1111905172266872, 0.0506142681451881};
    double L = 0.0;
    for (size_t i = 0; i + 1 < o.states.size(); ++i) {
        Vec2 a = o.states[i].x, d = o.states[i + 1].x - a;
        for (int k = 0; k < 8; ++k) L += gl8w[k] * m.F(a + d * gl8x[k], d);
    }
    return L;
}

OrbitSample arcLengthReparam(const OrbitSample& o, const Metric& m) {
    if (o.states.size() < 2) throw ValidationError("orbit too short to reparametrise");
    std::vector<double> cum(o.states.size(), 0.0);
    for (size_t i = 0; i + 1 < o.states.size(); ++i) {
        double f0 = m.F(o.states[i]);
        double f1 = m.F(o.states[i + 1]);
        if (!(f0 > 0.0) || !(f1 > 0.0)) throw ZeroSpeedError("orbit has vanishing F-speed");
        cum[i + 1] = cum[i] + 0.5 * (f0 + f1) * (o.times[i + 1] - o.times[i]);
    }
    double total = cum.back();
    size_t n = o.states.size();
    OrbitSample r;
    r.cotangent = o.cotangent;
    r.times.reserve(n);
    r.states.reserve(n);
    size_t j = 0;
    for (size_t i = 0; i < n; ++i) {
        double sTarget = total * double(i) / double(n - 1);
        while (j + 2 < n && cum[j + 1] < sTarget) ++j;
        double span = cum[j + 1] - cum[j];
        double u = span > 0 ? (sTarget - cum[j]) / span : 0.0;
        Vec2 x = o.states[j].x * (1 - u) + o.states[j + 1].x * u;
        Vec2 v = o.states[j].v * (1 - u) + o.states[j + 1].v * u;
        double f = m.F(x, v);
        r.times.push_back(sTarget);
        r.states.push_back({x, v / f});
        r.energyTrace.push_back(0.5);
    }
    return r;
}

}  // namespace fin
