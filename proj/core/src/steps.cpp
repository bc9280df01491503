#include "ellipsoid/steps.hpp"

#include <cmath>
#include <limits>

#include "ellipsoid/errors.hpp"

namespace ellipsoid {

CutDepths cut_depths(const EllipsoidState& st, int j) {
    const double gsq = st.semiwidth_sq()[j];
    if (!(gsq > 1e-300)) throw DegenerateDirection("semi-width vanished");
    CutDepths d;
    d.gamma = std::sqrt(st.f() * gsq);
    d.alpha = (st.tbar()[j] - st.v()[j]) / d.gamma;
    d.beta = (st.tbar()[j] + st.v()[j]) / d.gamma;
    return d;
}

double zeta_of_sigma(double alpha, double beta, double sigma) {
    const double half = 0.5 * (beta - alpha);
    return 1.0 - alpha * beta * sigma + half * half * sigma * sigma / (1.0 - sigma);
}

double eta_of_sigma(double alpha, double beta, int dim, double sigma) {
    const double z = zeta_of_sigma(alpha, beta, sigma);
    if (!(z > 0.0) || !(sigma < 1.0)) return std::numeric_limits<double>::infinity();
    return dim * std::log(z) + std::log(1.0 - sigma);
}

double sigma_zero(double dj, double gamma_j) {
    const double djg = dj * gamma_j * gamma_j;
    if (djg >= 1.0 - 1e-12)
        throw DegenerateDirection("d_j gamma_j^2 at one; dropping j loses definiteness");
    return -djg / (1.0 - djg);
}

std::optional<double> sigma_zeta(double alpha, double beta) {
    if (!(alpha < -1.0 && beta > 1.0)) return std::nullopt;
    const double ab = alpha * beta;
    const double sum = alpha + beta;
    if (std::fabs(sum) <= 1e-12) return 1.0 / (1.0 - alpha * alpha);
    const double disc = (1.0 - alpha * alpha) * (1.0 - beta * beta);
    return 2.0 * (1.0 + ab + std::sqrt(std::max(disc, 0.0))) / (sum * sum);
}

double sigma_eta(double alpha, double beta, int dim) {
    const double ab = alpha * beta;
    const double sum = alpha + beta;
    if (std::fabs(sum) <= 1e-12) return (1.0 + dim * ab) / (1.0 + ab);
    const double sum2 = sum * sum;
    const double da = 1.0 - alpha * alpha;
    const double db = 1.0 - beta * beta;
    const double diff = beta * beta - alpha * alpha;
    const double rho = std::sqrt(4.0 * da * db + static_cast<double>(dim) * dim * diff * diff);
    return (2.0 * (1.0 + dim * ab) + dim * sum2 - rho) / ((dim + 1) * sum2);
}

bool decrease_eligible(double alpha, double beta, int n) {
    if (n < 2) return false;
    const double thr = -2.0 / n;
    return alpha * beta <= thr && std::max(alpha, -beta) <= thr;
}

SigmaMenu plan_decrease(const EllipsoidState& st, int j, const CutDepths& depths) {
    SigmaMenu menu;
    const double djg = st.d()[j] * st.semiwidth_sq()[j];
    const bool droppable = djg < 1.0 - 1e-12;
    menu.sigma0 = droppable ? -djg / (1.0 - djg) : -std::numeric_limits<double>::infinity();
    menu.sigma_z = sigma_zeta(depths.alpha, depths.beta);
    menu.sigma_e = sigma_eta(depths.alpha, depths.beta, st.n());

    if (menu.sigma_z && *menu.sigma_z >= menu.sigma0) {
        menu.kind = StepCase::certify;
        menu.chosen = *menu.sigma_z;
        return menu;
    }
    // A nonnegative stationary point means the surrogate decreases all the
    // way down to sigma_0 (only reachable when sigma_zeta exists).
    if (menu.sigma_e >= 0.0 || menu.sigma_e <= menu.sigma0) {
        menu.kind = StepCase::drop;
        menu.chosen = menu.sigma0;
        return menu;
    }
    menu.kind = StepCase::decrease;
    menu.chosen = menu.sigma_e;
    return menu;
}

}  // namespace ellipsoid
