#pragma once

#include <cstdint>
#include <vector>

#include "finslerlab/metric.hpp"

namespace fin {

/// Phase-space snapshots of many unit-speed orbits on a shared time grid
/// (base point wrapped into the fundamental domain, plus velocity).
struct SnapshotSet {
    int samples = 0;
    long nSnaps = 0;  ///< snapshots per orbit, spacing dt
    double dt = 0.0;
    bool cylinder = false;
    double period1 = 1.0;
    std::vector<float> data;  ///< samples * nSnaps * 4 floats (x1,x2,v1,v2)

    const float* at(int orbit, long snap) const {
        return data.data() + (size_t(orbit) * size_t(nSnaps) + size_t(snap)) * 4;
    }
    /// product-metric distance on ST^2 (or the cylinder band)
    double dist(int a, int b, long snap) const;
    /// true if orbits a,b are (T,eps)-separated on the stride-subsampled grid
    bool separated(int a, int b, long maxSnap, int stride, double eps) const;
};

struct EntropyEstimate {
    double epsilon = 0.0;
    std::vector<double> T_values;
    std::vector<long> counts;
    std::vector<double> logCounts;
    double slope = 0.0;  ///< least-squares over the trailing half of the ladder
    int sampleSize = 0;
    std::uint64_t seed = 0;
    double slopeLo = 0.0, slopeHi = 0.0;  ///< bootstrap band
};

struct EntropyOptions {
    std::vector<double> epsilons = {0.2, 0.1, 0.05};  ///< processed small-to-large internally
    int ladderRungs = 8;                              ///< geometric T ladder
    double stepCap = 1e9;
    int bootstrap = 100;
    int bootstrapSubset = 200;
    double dtMax = 5e-3;  ///< internal integrator step bound
    double bandHalfWidth = 1.2;  ///< cylinder base-point band |x2| <= this
};

/// Separated-set entropy estimator: integrates `samples` unit-speed orbits to
/// T_max with snapshots at eps/(4 c_F), then for each (T, eps) extracts a
/// greedy maximal separated subset. The greedy sets are nested in T and
/// across the eps ladder, so counts are monotone by construction; greedy
/// 1-maximality makes this a documented estimator of s(T,eps), not s itself.
std::vector<EntropyEstimate> estimateEntropy(const Metric& m, double T_max, int samples,
                                             std::uint64_t seed, const EntropyOptions& opt = {});

/// Size of the greedy (T,eps)-separated subset over the given candidate order.
long separationCount(const SnapshotSet& s, const std::vector<int>& order, double T, double eps,
                     int stride);

/// Builds the snapshot set (also used by the brute-force oracle tests).
SnapshotSet integrateSnapshots(const Metric& m, double T_max, int samples, std::uint64_t seed,
                               double snapDt, const EntropyOptions& opt);

}  // namespace fin
