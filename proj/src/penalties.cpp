#include "lsir/penalties.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lsir {

PenaltyKind scad(double t) {
    if (!(t > 2.0)) throw std::invalid_argument("scad: requires t > 2");
    return {PenaltyKind::Family::Scad, t};
}

PenaltyKind mcp(double t) {
    if (!(t > 1.0)) throw std::invalid_argument("mcp: requires t > 1");
    return {PenaltyKind::Family::Mcp, t};
}

PenaltyKind penalty_from_string(const char* name, double t_override) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "scad") return scad(t_override > 0.0 ? t_override : 3.7);
    if (s == "mcp") return mcp(t_override > 0.0 ? t_override : 3.0);
    throw std::invalid_argument("unknown penalty: " + s);
}

double pen_value(double u, const PenaltyParams& p) {
    const double lam = p.lambda;
    const double t = p.kind.t;
    const double a = std::fabs(u);
    if (lam == 0.0) return 0.0;
    if (p.kind.family == PenaltyKind::Family::Mcp) {
        if (a <= t * lam) return lam * a - a * a / (2.0 * t);
        return t * lam * lam / 2.0;
    }
    // SCAD
    if (a <= lam) return lam * a;
    if (a <= t * lam) return (2.0 * t * lam * a - a * a - lam * lam) / (2.0 * (t - 1.0));
    return lam * lam * (t + 1.0) / 2.0;
}

double pen_deriv(double u, const PenaltyParams& p) {
    if (!(u > 0.0)) throw std::invalid_argument("pen_deriv: u must be > 0");
    const double lam = p.lambda;
    const double t = p.kind.t;
    if (p.kind.family == PenaltyKind::Family::Mcp) return lam * std::max(1.0 - u / (t * lam), 0.0);
    return lam * std::min(1.0, std::max(t - u / lam, 0.0) / (t - 1.0));
}

double pen_deriv2(double u, const PenaltyParams& p) {
    if (!(u > 0.0)) throw std::invalid_argument("pen_deriv2: u must be > 0");
    const double lam = p.lambda;
    const double t = p.kind.t;
    if (lam == 0.0) return 0.0;
    if (p.kind.family == PenaltyKind::Family::Mcp) return u < t * lam ? -1.0 / t : 0.0;
    return (u > lam && u < t * lam) ? -1.0 / (t - 1.0) : 0.0;
}

double soft_threshold(double x, double lam) {
    if (lam < 0.0) throw std::invalid_argument("soft_threshold: lam must be >= 0");
    const double a = std::fabs(x) - lam;
    if (a <= 0.0) return 0.0;
    return x > 0.0 ? a : -a;
}

double prox(double u, const PenaltyParams& p, double vartheta) {
    if (!(vartheta > 0.0)) throw std::invalid_argument("prox: vartheta must be > 0");
    const double lam = p.lambda;
    const double t = p.kind.t;
    const double a = std::fabs(u);
    if (p.kind.family == PenaltyKind::Family::Mcp) {
        if (!(t > 1.0 / vartheta))
            throw std::invalid_argument("prox: MCP requires t > 1/vartheta");
        if (a > t * lam) return u;
        return soft_threshold(u, lam / vartheta) / (1.0 - 1.0 / (t * vartheta));
    }
    if (!(t > 1.0 / vartheta + 1.0))
        throw std::invalid_argument("prox: SCAD requires t > 1/vartheta + 1");
    if (a <= lam * (1.0 + 1.0 / vartheta)) return soft_threshold(u, lam / vartheta);
    if (a <= t * lam)
        return soft_threshold(u, t * lam / ((t - 1.0) * vartheta)) /
               (1.0 - 1.0 / ((t - 1.0) * vartheta));
    return u;
}

} // namespace lsir
