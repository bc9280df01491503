#ifndef ELLIPSOID_STEPS_HPP
#define ELLIPSOID_STEPS_HPP

#include <optional>

#include "ellipsoid/state.hpp"

namespace ellipsoid {

// Depths of the two cuts of constraint j through the unit-f ellipsoid:
// alpha = (a_j^T ybar - u_j)/gamma_j, beta = (a_j^T ybar - l_j)/gamma_j.
// alpha < beta always; alpha > 0 means the center violates the upper bound.
struct CutDepths {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

CutDepths cut_depths(const EllipsoidState& st, int j);

// f(d_+(sigma), l) when f(d, l) = 1.
double zeta_of_sigma(double alpha, double beta, double sigma);

// n ln zeta(sigma) + ln(1 - sigma), the change of the volume surrogate.
double eta_of_sigma(double alpha, double beta, int dim, double sigma);

// The sigma at which d_j hits zero. Throws DegenerateDirection when
// d_j gamma_j^2 is at one (the drop would lose positive definiteness).
double sigma_zero(double dj, double gamma_j);

// The root of zeta closest to zero; present only when alpha < -1 < 1 < beta.
std::optional<double> sigma_zeta(double alpha, double beta);

// Stationary point of dim * ln zeta + ln(1 - sigma). For alpha + beta = 0
// this is (1 + dim*alpha*beta)/(1 + alpha*beta); otherwise the appropriate
// root of the derivative quadratic, the same closed form for both signs of
// 1 + dim*alpha*beta.
double sigma_eta(double alpha, double beta, int dim);

// Theorem conditions under which a negative step still reduces volume:
// alpha*beta <= -2/n and max(alpha, -beta) <= -2/n, n >= 2.
bool decrease_eligible(double alpha, double beta, int n);

enum class StepCase { increase, decrease, drop, certify };

struct SigmaMenu {
    double sigma0 = 0.0;
    std::optional<double> sigma_z;
    double sigma_e = 0.0;
    StepCase kind = StepCase::decrease;
    double chosen = 0.0;
};

// Resolves a decrease-eligible index into certify (sigma_zeta reachable),
// drop (sigma_eta at or below sigma_0, take sigma_0) or decrease (sigma_eta).
SigmaMenu plan_decrease(const EllipsoidState& st, int j, const CutDepths& depths);

}  // namespace ellipsoid

#endif
