#include "finslerlab/mather.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fin {

namespace {

struct NormCache {
    const ActionGraph& g;
    std::map<std::pair<int, int>, double> cache;
    double operator()(Vec2i z) {
        auto key = std::make_pair(z.x, z.y);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        double v = stableNorm(g, z).length;
        cache.emplace(key, v);
        return v;
    }
};

/// Stern-Brocot bracket of a direction inside one (signed) quadrant.
/// Returns primitive za, zb with det[za,zb] = +-1 and h = a*za + b*zb, a,b >= 0.
void fareyBracket(const Vec2& h, int Q, Vec2i& za, Vec2i& zb, double& a, double& b) {
    int sx = h.x >= 0 ? 1 : -1;
    int sy = h.y >= 0 ? 1 : -1;
    Vec2 habs{std::abs(h.x), std::abs(h.y)};
    Vec2i lo{1, 0}, hi{0, 1};
    // descend while the mediant stays within the denominator budget
    while (true) {
        Vec2i med{lo.x + hi.x, lo.y + hi.y};
        if (maxAbs(med) > Q) break;
        double side = habs.x * med.y - habs.y * med.x;  // >0: h below med slope
        if (side > 0)
            hi = med;
        else
            lo = med;
        if (side == 0) break;
    }
    za = {sx * lo.x, sy * lo.y};
    zb = {sx * hi.x, sy * hi.y};
    // solve h = a za + b zb
    double det = double(za.x) * zb.y - double(za.y) * zb.x;
    a = (h.x * zb.y - h.y * zb.x) / det;
    b = (za.x * h.y - za.y * h.x) / det;
}

}  // namespace

double stableNormReal(const ActionGraph& g, const Vec2& h, int Q) {
    if (h.x == 0 && h.y == 0) return 0.0;
    NormCache sn{g};
    // axis-aligned and exactly rational directions at small denominator
    Vec2i za, zb;
    double a, b;
    fareyBracket(h, Q, za, zb, a, b);
    if (a < 1e-12) return b * sn(zb);
    if (b < 1e-12) return a * sn(za);
    return a * sn(za) + b * sn(zb);
}

double beta(const ActionGraph& g, const Vec2& h, int Q) {
    if (h.x == 0 && h.y == 0) throw ValidationError("beta(0) is excluded");
    // integer classes go through one exact cover computation
    double rx = std::round(h.x), ry = std::round(h.y);
    if (std::abs(h.x - rx) < 1e-12 && std::abs(h.y - ry) < 1e-12 &&
        (std::abs(rx) > 0.5 || std::abs(ry) > 0.5)) {
        double s = stableNorm(g, Vec2i{int(rx), int(ry)}).length;
        return 0.5 * s * s;
    }
    double s = stableNormReal(g, h, Q);
    return 0.5 * s * s;
}

AlphaTable alphaLevel(const ActionGraph& g, int directions) {
    if (directions < 16) throw ValidationError("need at least 16 directions");
    AlphaTable t;
    t.theta.reserve(directions);
    for (int k = 0; k < directions; ++k) {
        double th = 2 * M_PI * k / directions;
        Vec2 e{std::cos(th), std::sin(th)};
        double al = criticalAlpha(g, e);
        double r = al > 0 ? 1.0 / std::sqrt(2.0 * al) : std::numeric_limits<double>::infinity();
        t.theta.push_back(th);
        t.alphaUnit.push_back(al);
        t.radius.push_back(r);
        t.eta.push_back(e * r);
    }
    return t;
}

Vec2 supportEta(const ActionGraph& g, const Vec2& hDirection, const AlphaTable* table) {
    Vec2 hhat = normalized(hDirection);
    auto value = [&](double th) {
        Vec2 e{std::cos(th), std::sin(th)};
        double al = criticalAlpha(g, e);
        if (!(al > 0)) return -1e300;
        return dot(e, hhat) / std::sqrt(2.0 * al);
    };
    double bestTh = std::atan2(hhat.y, hhat.x);
    if (table && !table->theta.empty()) {
        double bestVal = -1e300;
        for (size_t k = 0; k < table->theta.size(); ++k) {
            double v = dot(table->eta[k], hhat);
            if (v > bestVal) {
                bestVal = v;
                bestTh = table->theta[k];
            }
        }
    }
    double span = table && !table->theta.empty() ? 2 * M_PI / double(table->theta.size()) : 0.2;
    double lo = bestTh - span, hi = bestTh + span;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = value(c), fd = value(d);
    for (int it = 0; it < 24; ++it) {
        if (fc > fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo);
            fc = value(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo);
            fd = value(d);
        }
    }
    double th = fc > fd ? c : d;
    Vec2 e{std::cos(th), std::sin(th)};
    double al = criticalAlpha(g, e);
    return e / std::sqrt(2.0 * al);
}

BetaCornerReport betaCorner(const Metric& m, const ActionGraph& g, Vec2i z, int Q) {
    if (!isPrimitive(z)) throw ValidationError("z must be primitive");
    if (Q < 4) throw ValidationError("Q must be at least 4");
    // transverse primitive w with det[z, w] = 1 (extended gcd)
    Vec2i w{0, 0};
    {
        int p = z.x, q = z.y;
        // shortest (a,b) with det[z,(a,b)] = p*b - q*a = 1
        for (int a = -std::abs(q) - 1; a <= std::abs(q) + 1; ++a) {
            long num = 1 + long(q) * a;
            if (p != 0 && num % p == 0) {
                Vec2i cand{a, int(num / p)};
                if (w == Vec2i{0, 0} || maxAbs(cand) < maxAbs(w)) w = cand;
            }
        }
        if (w == Vec2i{0, 0}) w = {-z.y, 0};  // z = (0, +-1)
    }

    auto refinedNorm = [&](Vec2i cls) {
        int nPath = std::max(64, 24 * (std::abs(cls.x) + std::abs(cls.y)));
        PeriodicMinimizer pm = periodicMinimizer(m, cls, nPath, g);
        return pm.length;
    };

    int q1 = std::max(2, Q / 2), q2 = Q;
    double sz = refinedNorm(z);
    auto oneSided = [&](int q, double& right, double& left) {
        double sp = refinedNorm(Vec2i{q * z.x + w.x, q * z.y + w.y});
        double sm = refinedNorm(Vec2i{q * z.x - w.x, q * z.y - w.y});
        right = sp - q * sz;
        left = q * sz - sm;
    };
    double r1, l1, r2, l2;
    oneSided(q1, r1, l1);
    oneSided(q2, r2, l2);
    // Richardson: f(q) = f_inf + C/q, eliminate the curvature term
    double w1 = double(q2) / double(q2 - q1), w0 = double(q1) / double(q2 - q1);
    BetaCornerReport rep;
    rep.rightSlope = w1 * r2 - w0 * r1;
    rep.leftSlope = w1 * l2 - w0 * l1;
    rep.jump = rep.rightSlope - rep.leftSlope;
    rep.corner = rep.jump > 5e-3;
    return rep;
}

std::vector<BetaTableEntry> betaTable(const ActionGraph& g, int Q) {
    NormCache sn{g};
    // Farey directions of denominator <= Q, by angle, all sign patterns
    std::vector<Vec2i> dirs;
    for (int p = 0; p <= Q; ++p)
        for (int q = 0; q <= Q; ++q) {
            if (p == 0 && q == 0) continue;
            if (gcd2(p, q) != 1) continue;
            dirs.push_back({p, q});
            if (p > 0) dirs.push_back({-p, q});
            if (q > 0) dirs.push_back({p, -q});
            if (p > 0 && q > 0) dirs.push_back({-p, -q});
        }
    std::sort(dirs.begin(), dirs.end(), [](const Vec2i& a, const Vec2i& b) {
        return std::atan2(double(a.y), double(a.x)) < std::atan2(double(b.y), double(b.x));
    });
    std::vector<BetaTableEntry> out;
    out.reserve(dirs.size());
    for (const auto& z : dirs) {
        BetaTableEntry e;
        e.z = z;
        double s = sn(z);
        e.beta = 0.5 * s * s;
        e.h = z.toVec() / s;
        out.push_back(e);
    }
    // graph-level one-sided slopes of beta on euclidean unit directions
    std::vector<double> bu(out.size());
    for (size_t i = 0; i < out.size(); ++i) {
        double nz = norm(out[i].z.toVec());
        double su = std::sqrt(2.0 * out[i].beta) / nz;
        bu[i] = 0.5 * su * su;
    }
    for (size_t i = 0; i < out.size(); ++i) {
        size_t ip = (i + out.size() - 1) % out.size();
        size_t in = (i + 1) % out.size();
        auto ang = [](const Vec2i& v) { return std::atan2(double(v.y), double(v.x)); };
        double d10 = std::remainder(ang(out[i].z) - ang(out[ip].z), 2 * M_PI);
        double d21 = std::remainder(ang(out[in].z) - ang(out[i].z), 2 * M_PI);
        out[i].leftSlope = d10 != 0 ? (bu[i] - bu[ip]) / d10 : 0.0;
        out[i].rightSlope = d21 != 0 ? (bu[in] - bu[i]) / d21 : 0.0;
    }
    return out;
}

}  // namespace fin
