#pragma once

#include <string>

namespace fastdiff {

/// Problem parameters for the radial profile family.
///
/// Validity requires n >= 3, 0 < m < (n-2)/n, rho1 > 0, lambda > 0 and
/// beta >= m*rho1/(n-2-n*m) (the minimal range in which the singular
/// profile exists).
struct ParamSet {
    int n = 3;          ///< space dimension
    double m = 0.2;     ///< diffusion exponent, 0 < m < (n-2)/n
    double rho1 = 1.0;  ///< scaling constant, > 0
    double beta = 5.0;  ///< self-similar exponent
    double lambda = 1.0;///< profile amplitude, > 0

    /// alpha = (2*beta + rho1)/(1 - m), fixed by the self-similar ansatz.
    double alpha() const { return (2.0 * beta + rho1) / (1.0 - m); }
};

/// Every closed-form constant derived from a ParamSet.
struct DerivedConstants {
    double alpha = 0;          ///< (2*beta+rho1)/(1-m)
    double beta1 = 0;          ///< rho1/(n-2-n*m), uniqueness threshold
    double beta0 = 0;          ///< real-roots threshold
    double beta2 = 0;          ///< second-order threshold (sufficient, not minimal)
    double A_beta = 0;         ///< n-2-(n+2)m + 2*beta*(n-2-n*m)/rho1
    double discriminant = 0;   ///< A_beta^2 - 8*(n-2-n*m)*(1-m)
    bool real_roots = false;   ///< discriminant >= 0
    double gamma1 = 0;         ///< smaller root of the tail quadratic (NaN if complex)
    double gamma2 = 0;         ///< larger root (NaN if complex)
    double Cstar = 0;          ///< 2m(n-2-nm)/((1-m)rho1), far-field constant
    double M0 = 0;             ///< 2m(n-2-nm)/((1-m)(gamma2-gamma1)) (NaN if complex)
    double A1_beta = 0;        ///< 1/(1-m) - beta*gamma1/rho1 (NaN if complex)
    double A2_beta = 0;        ///< 1/(1-m) - beta*gamma2/rho1 (NaN if complex)
    double n_beta_minus_alpha = 0; ///< n*beta - alpha; > 0 iff beta > beta1
};

/// Ladder of regimes in increasing strength of what the theory guarantees.
enum class BetaRegime {
    existence_only, ///< beta in [m*rho1/(n-2-nm), beta1): singular profile exists
    uniqueness,     ///< beta >= beta1: singular profile also unique
    real_roots,     ///< additionally beta >= beta0: tail roots gamma1, gamma2 real
    second_order,   ///< beta > beta2: second-order expansion with B > 0 certified
};

struct BetaClassification {
    BetaRegime regime;
    bool at_uniqueness_boundary; ///< beta == beta1 (=> n*beta == alpha)
    double n_beta_minus_alpha;
    int sign_n_beta_minus_alpha; ///< -1, 0, +1
};

std::string to_string(BetaRegime r);

/// Threshold below which no profile of the family exists: m*rho1/(n-2-n*m).
double beta_existence_min(int n, double m, double rho1);

/// Checks every ParamSet invariant; returns the set unchanged.
/// Throws RangeError naming the violated inequality.
ParamSet validate(const ParamSet& p);

/// Computes all closed-form constants. Requires a valid ParamSet.
///
/// Complex roots (discriminant < 0) are reported via real_roots=false with
/// the gamma/M0/Ai fields set to NaN; this is not an error because alpha,
/// beta0, beta1 and Cstar remain meaningful for beta < beta0.
DerivedConstants derive(const ParamSet& p);

/// The sufficient second-order threshold beta2 = max(a0*rho1, beta0, beta1).
///
/// a0 equals b0 = max(2*sqrt(2(1-m)/((n-2-nm)(1-c2^2))), sqrt(2/(n-2-nm)))
/// with c2 = (1-m/2)^2 whenever 0 < m <= (n-2)/(n+2). For larger m the value
/// is certified numerically: the smallest a0 > b0 such that A1(beta) > 0 for
/// 64 betas sampled log-uniformly in (max(a0*rho1,beta0,beta1), 1000*rho1].
double beta2_lower_bound(const ParamSet& p);

/// Places beta on the regime ladder and reports the sign of n*beta - alpha.
BetaClassification classify_beta(const ParamSet& p);

} // namespace fastdiff
