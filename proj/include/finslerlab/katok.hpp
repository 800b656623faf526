#pragma once

#include <cstdint>
#include <vector>

#include "finslerlab/flow.hpp"
#include "finslerlab/metric.hpp"
#include "finslerlab/profile.hpp"

namespace fin {

/// Cone set M_a in T*R^2 over the cylinder: positively homogeneous in the
/// fiber; membership on the unit level {F_g = 1} is |x2| <= a, eta1 >= g0(a).
struct ConeSet {
    double a = 0.0;
    Profile profile;  ///< the rotational profile g (must equal g0 on [-b,b])

    /// min(a - |x2|, eta1/F_g - g0(a)); nonnegative inside.
    double margin(const Vec2& x, const Vec2& eta) const;
    bool contains(const Vec2& x, const Vec2& eta, double tol = 0.0) const {
        return margin(x, eta) >= -tol;
    }
};

struct KatokCheckSample {
    Vec2 x0, eta0;
    double returnErrorRot = 0.0;    ///< phase-space error of phi^{2pi}_{F_{1,0}}
    double returnErrorTrans = 0.0;  ///< same for phi^{2pi}_{F_{0,1}}
    double minMarginA0 = 0.0;       ///< min M_{a0} margin along the mixed orbit
    double minMarginA1 = 0.0;
    double fgDrift = 0.0;           ///< relative drift of F_g along the mixed orbit
    double eta1Drift = 0.0;         ///< absolute drift of eta1
    bool inA0 = false;              ///< sample drawn inside M_{a0} (else the shell)
};

struct KatokCheckReport {
    std::vector<KatokCheckSample> samples;
    double maxReturnErrorRot = 0.0;
    double maxReturnErrorTrans = 0.0;
    double minMarginA0 = 0.0;   ///< over samples drawn in M_{a0}
    double minMarginA1 = 0.0;   ///< over all samples
    double maxFgDrift = 0.0;
    double maxEta1Drift = 0.0;
    int shellLeaks = 0;         ///< shell samples that entered M_{a0}
};

/// Integrates samples drawn in M_{a0} and in M_{a1} - M_{a0} under the pure
/// rotational flow, the pure translation flow and the mixed Katok-Ziller flow;
/// verifies cone invariance and the period-2pi return identities.
KatokCheckReport checkInvarianceAndPeriod(const Metric& kz, double a0, double a1, int samples,
                                          std::uint64_t seed, double dt = 1e-3);

/// psi plateau residuals: max |psi - eta1| on M_{a0} samples and max |psi|
/// outside M_{a1}.
struct PsiPlateauReport {
    double maxInnerResidual = 0.0;
    double maxOuterResidual = 0.0;
    int samplesChecked = 0;
};
PsiPlateauReport checkPsiPlateaus(const Metric& kz, double a0, double a1, double b, int samples,
                                  std::uint64_t seed);

/// Symmetrized (reversible) dual norm F1*(x,eta) = F0*(x,eta) for eta1 >= 0
/// and F0*(x,-eta) for eta1 <= 0.
MetricPtr reversibilize(MetricPtr kz);

}  // namespace fin
