#include "finslerlab/profile.hpp"

#include <cmath>

namespace fin {

Profile Profile::sphere() {
    Profile p;
    p.kind_ = Kind::Sphere;
    return p;
}

Profile Profile::table(double lo, double hi, std::vector<double> g, std::vector<double> dg) {
    if (g.size() < 2 || g.size() != dg.size() || !(hi > lo))
        throw ValidationError("profile table needs >= 2 samples on a proper interval");
    Profile p;
    p.kind_ = Kind::Table;
    p.lo_ = lo;
    p.hi_ = hi;
    p.gv_ = std::move(g);
    p.dgv_ = std::move(dg);
    p.dt_ = (hi - lo) / double(p.gv_.size() - 1);
    return p;
}

double Profile::g(double t) const {
    if (kind_ == Kind::Sphere) return 1.0 / std::cosh(t);
    if (t < lo_ || t > hi_) throw BlowUpError("profile evaluated outside its domain");
    double s = (t - lo_) / dt_;
    auto i = size_t(s);
    if (i >= gv_.size() - 1) i = gv_.size() - 2;
    double u = s - double(i);
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    double h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u);
    double h11 = u * u * (u - 1);
    return h00 * gv_[i] + h10 * dt_ * dgv_[i] + h01 * gv_[i + 1] + h11 * dt_ * dgv_[i + 1];
}

double Profile::dg(double t) const {
    if (kind_ == Kind::Sphere) {
        double s = 1.0 / std::cosh(t);
        return -s * std::tanh(t);
    }
    if (t < lo_ || t > hi_) throw BlowUpError("profile evaluated outside its domain");
    double s = (t - lo_) / dt_;
    auto i = size_t(s);
    if (i >= gv_.size() - 1) i = gv_.size() - 2;
    double u = s - double(i);
    double d00 = 6 * u * (u - 1);
    double d10 = (1 - u) * (1 - 3 * u);
    double d01 = -d00;
    double d11 = u * (3 * u - 2);
    return (d00 * gv_[i] + d01 * gv_[i + 1]) / dt_ + d10 * dgv_[i] + d11 * dgv_[i + 1];
}

RevolutionProfile profileOde(const std::function<double(double)>& c1, double h0, double t0,
                             double span_lo, double span_hi, double j_lo, double j_hi,
                             double tol) {
    if (!(span_lo < t0 && t0 < span_hi)) throw ValidationError("t0 must be interior to the span");

    // march RK4 in both directions from t0; step chosen so the local error of
    // the quarter-step check stays below tol
    double step = 1e-3;
    auto rhs = [&](double h) { return c1(h); };
    auto march = [&](double dir, std::vector<double>& hs, std::vector<double>& ts) {
        double h = h0, t = t0;
        double limit = dir > 0 ? span_hi : span_lo;
        while (dir * (limit - t) > 1e-12) {
            double dt = std::min(step, std::abs(limit - t)) * dir;
            double k1 = rhs(h);
            double k2 = rhs(h + 0.5 * dt * k1);
            double k3 = rhs(h + 0.5 * dt * k2);
            double k4 = rhs(h + dt * k3);
            h += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            t += dt;
            if (h <= j_lo || h >= j_hi) throw BlowUpError("h left the generating interval J");
            hs.push_back(h);
            ts.push_back(t);
        }
    };
    std::vector<double> hsF, tsF, hsB, tsB;
    march(+1.0, hsF, tsF);
    march(-1.0, hsB, tsB);

    // assemble uniform Hermite table: g = c1(h), g' = c1'(h) h' = c1'(h) c1(h)
    std::vector<double> hall;
    hall.reserve(hsB.size() + 1 + hsF.size());
    for (auto it = hsB.rbegin(); it != hsB.rend(); ++it) hall.push_back(*it);
    hall.push_back(h0);
    for (double v : hsF) hall.push_back(v);

    auto dc1 = [&](double h) {
        double e = 1e-6;
        return (c1(h + e) - c1(h - e)) / (2 * e);
    };
    std::vector<double> g(hall.size()), dg(hall.size());
    for (size_t i = 0; i < hall.size(); ++i) {
        g[i] = c1(hall[i]);
        dg[i] = dc1(hall[i]) * c1(hall[i]);
    }
    RevolutionProfile out;
    out.lo = span_lo;
    out.hi = span_hi;
    out.profile = Profile::table(span_lo, span_hi, g, dg);

    // consistency check of the interpolant against the ODE identity
    double maxErr = 0.0;
    for (int i = 0; i <= 200; ++i) {
        double t = span_lo + (span_hi - span_lo) * i / 200.0;
        double gd = out.profile.dg(t);
        double hloc = hall[std::min(hall.size() - 1, size_t((t - span_lo) / step + 0.5))];
        double rhsv = dc1(hloc) * c1(hloc);
        maxErr = std::max(maxErr, std::abs(gd - rhsv));
    }
    out.maxCheckError = maxErr;
    if (maxErr > std::max(tol, 1e-6))
        throw ValidationError("profile interpolation error above tolerance");
    return out;
}

}  // namespace fin
