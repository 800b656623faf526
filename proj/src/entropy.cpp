#include "finslerlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "finslerlab/flow.hpp"

namespace fin {

double SnapshotSet::dist(int a, int b, long snap) const {
    const float* pa = at(a, snap);
    const float* pb = at(b, snap);
    double dx1 = std::remainder(double(pa[0]) - double(pb[0]), period1);
    double dx2 = double(pa[1]) - double(pb[1]);
    if (!cylinder) dx2 = std::remainder(dx2, 1.0);
    double dv1 = double(pa[2]) - double(pb[2]);
    double dv2 = double(pa[3]) - double(pb[3]);
    return std::sqrt(dx1 * dx1 + dx2 * dx2 + dv1 * dv1 + dv2 * dv2);
}

bool SnapshotSet::separated(int a, int b, long maxSnap, int stride, double eps) const {
    for (long s = 0; s <= maxSnap; s += stride)
        if (dist(a, b, s) > eps) return true;
    return false;
}

SnapshotSet integrateSnapshots(const Metric& m, double T_max, int samples, std::uint64_t seed,
                               double snapDt, const EntropyOptions& opt) {
    SnapshotSet out;
    out.samples = samples;
    out.dt = snapDt;
    out.cylinder = m.chart() == Chart::Cylinder;
    out.period1 = m.period1();
    out.nSnaps = long(std::floor(T_max / snapDt + 1e-9)) + 1;
    out.data.resize(size_t(samples) * size_t(out.nSnaps) * 4);

    // internal step: divide the snapshot interval evenly, bounded by dtMax
    int sub = std::max(1, int(std::ceil(snapDt / opt.dtMax - 1e-12)));
    double h = snapDt / sub;
    if (double(samples) * (T_max / h) > opt.stepCap)
        throw BudgetExceededError("samples * T_max / dt exceeds the step cap");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < samples; ++i) {
        Vec2 x{uni(rng) * out.period1,
               out.cylinder ? (uni(rng) * 2.0 - 1.0) * opt.bandHalfWidth : uni(rng)};
        double phi = uni(rng) * 2 * M_PI;
        Vec2 dir{std::cos(phi), std::sin(phi)};
        TangentVec w0{x, dir};
        if (out.cylinder) {
            // draw a unit covector direction instead: F*(x, e)=1 scaling
            double f = m.dualF(x, dir);
            Vec2 eta = dir / f;
            w0.v = m.covectorToVelocity(x, eta);
        } else {
            double f = m.F(x, dir);
            w0.v = dir / f;
        }
        OrbitSample o = integrate(m, w0, T_max, h, sub);
        if (long(o.states.size()) < out.nSnaps)
            throw ValidationError("snapshot grid mismatch");
        for (long s = 0; s < out.nSnaps; ++s) {
            const TangentVec& st = o.states[size_t(s)];
            float* dst = out.data.data() + (size_t(i) * size_t(out.nSnaps) + size_t(s)) * 4;
            double x1 = std::fmod(st.x.x, out.period1);
            if (x1 < 0) x1 += out.period1;
            double x2 = st.x.y;
            if (!out.cylinder) {
                x2 = std::fmod(x2, 1.0);
                if (x2 < 0) x2 += 1.0;
            }
            dst[0] = float(x1);
            dst[1] = float(x2);
            dst[2] = float(st.v.x);
            dst[3] = float(st.v.y);
        }
    }
    return out;
}

long separationCount(const SnapshotSet& s, const std::vector<int>& order, double T, double eps,
                     int stride) {
    long maxSnap = std::min(s.nSnaps - 1, long(std::floor(T / s.dt + 1e-9)));
    std::vector<int> accepted;
    for (int cand : order) {
        bool ok = true;
        for (int acc : accepted) {
            if (!s.separated(cand, acc, maxSnap, stride, eps)) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back(cand);
    }
    return long(accepted.size());
}

std::vector<EntropyEstimate> estimateEntropy(const Metric& m, double T_max, int samples,
                                             std::uint64_t seed, const EntropyOptions& opt) {
    if (samples < 2) throw ValidationError("need at least 2 samples");
    std::vector<double> eps = opt.epsilons;
    std::sort(eps.begin(), eps.end());  // ascending: finest snapshots first
    for (double e : eps)
        if (e < 1e-3 || e > 0.5) throw ValidationError("epsilon must lie in [1e-3, 0.5]");

    EquivalenceConstants cf = estimateCF(m);
    double baseDt = eps.front() / (4.0 * cf.cF);
    SnapshotSet snaps = integrateSnapshots(m, T_max, samples, seed, baseDt, opt);

    // geometric T ladder snapped to the snapshot grid
    std::vector<double> ladder;
    for (int k = opt.ladderRungs - 1; k >= 0; --k) {
        double T = T_max / std::pow(2.0, k);
        long sn = std::max(1L, long(std::floor(T / baseDt + 1e-9)));
        ladder.push_back(double(sn) * baseDt);
    }

    // greedy accepted sets nested in T (per eps) and across the eps ladder
    // (larger-eps candidates drawn from the smaller-eps accepted set)
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<int> baseOrder(size_t(samples));
    for (int i = 0; i < samples; ++i) baseOrder[size_t(i)] = i;
    std::shuffle(baseOrder.begin(), baseOrder.end(), rng);

    size_t ne = eps.size();
    std::vector<EntropyEstimate> result(ne);
    std::vector<std::vector<int>> accepted(ne);  // per eps, current rung's set
    for (size_t e = 0; e < ne; ++e) {
        result[e].epsilon = eps[e];
        result[e].sampleSize = samples;
        result[e].seed = seed;
    }
    for (double T : ladder) {
        long maxSnap = std::min(snaps.nSnaps - 1, long(std::floor(T / baseDt + 1e-9)));
        for (size_t e = 0; e < ne; ++e) {
            int stride = std::max(1, int(std::llround(eps[e] / eps.front())));
            const std::vector<int>& cands = (e == 0) ? baseOrder : accepted[e - 1];
            std::vector<int> acc = accepted[e];  // nested in T
            std::vector<char> inAcc(size_t(samples), 0);
            for (int i : acc) inAcc[size_t(i)] = 1;
            for (int cand : cands) {
                if (inAcc[size_t(cand)]) continue;
                bool ok = true;
                for (int a : acc)
                    if (!snaps.separated(cand, a, maxSnap, stride, eps[e])) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    acc.push_back(cand);
                    inAcc[size_t(cand)] = 1;
                }
            }
            accepted[e] = std::move(acc);
            result[e].T_values.push_back(T);
            result[e].counts.push_back(long(accepted[e].size()));
            result[e].logCounts.push_back(std::log(double(accepted[e].size())));
        }
    }

    auto fitSlope = [](const std::vector<double>& T, const std::vector<double>& y, size_t from) {
        double n = 0, st = 0, stt = 0, sy = 0, sty = 0;
        for (size_t i = from; i < T.size(); ++i) {
            n += 1;
            st += T[i];
            stt += T[i] * T[i];
            sy += y[i];
            sty += T[i] * y[i];
        }
        double den = stt - st * st / n;
        return den > 0 ? (sty - st * sy / n) / den : 0.0;
    };
    for (size_t e = 0; e < ne; ++e) {
        size_t from = result[e].T_values.size() / 2;
        result[e].slope = fitSlope(result[e].T_values, result[e].logCounts, from);
    }

    // bootstrap band over sample subsets (capped subset; verdicts cached)
    if (opt.bootstrap > 0) {
        int nsub = std::min(samples, opt.bootstrapSubset);
        std::vector<int> subset(baseOrder.begin(), baseOrder.begin() + nsub);
        for (size_t e = 0; e < ne; ++e) {
            int stride = std::max(1, int(std::llround(eps[e] / eps.front())));
            // first rung (ladder index) at which each pair separates
            std::vector<int> firstRung(size_t(nsub) * nsub, int(ladder.size()));
            for (int i = 0; i < nsub; ++i)
                for (int j = i + 1; j < nsub; ++j) {
                    for (size_t r = 0; r < ladder.size(); ++r) {
                        long lo = r == 0 ? 0 : long(std::floor(ladder[r - 1] / baseDt + 1e-9));
                        long hi = std::min(snaps.nSnaps - 1,
                                           long(std::floor(ladder[r] / baseDt + 1e-9)));
                        lo = (lo / stride) * stride;
                        bool sep = false;
                        for (long sidx = lo; sidx <= hi; sidx += stride)
                            if (snaps.dist(subset[size_t(i)], subset[size_t(j)], sidx) > eps[e]) {
                                sep = true;
                                break;
                            }
                        if (sep) {
                            firstRung[size_t(i) * nsub + j] = int(r);
                            firstRung[size_t(j) * nsub + i] = int(r);
                            break;
                        }
                    }
                }
            std::vector<double> slopes;
            std::mt19937_64 brng(seed ^ 0xdeadbeefcafef00dull);
            std::uniform_int_distribution<int> pick(0, nsub - 1);
            for (int rep = 0; rep < opt.bootstrap; ++rep) {
                std::vector<int> resample(size_t(nsub));
                for (int i = 0; i < nsub; ++i) resample[size_t(i)] = pick(brng);
                std::vector<double> lc;
                for (size_t r = 0; r < ladder.size(); ++r) {
                    std::vector<int> acc;
                    for (int cand : resample) {
                        bool ok = true;
                        for (int a : acc) {
                            if (cand == a ||
                                firstRung[size_t(cand) * nsub + a] > int(r)) {
                                ok = false;
                                break;
                            }
                        }
                        if (ok) acc.push_back(cand);
                    }
                    lc.push_back(std::log(double(std::max<size_t>(1, acc.size()))));
                }
                slopes.push_back(fitSlope(ladder, lc, ladder.size() / 2));
            }
            std::sort(slopes.begin(), slopes.end());
            result[e].slopeLo = slopes[size_t(std::floor(0.05 * (slopes.size() - 1)))];
            result[e].slopeHi = slopes[size_t(std::ceil(0.95 * (slopes.size() - 1)))];
        }
    }
    // report with epsilon descending, matching the configured ladder
    std::reverse(result.begin(), result.end());
    return result;
}

}  // namespace fin
