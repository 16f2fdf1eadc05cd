#pragma once

namespace lsir {

/// Folded-concave penalty family with concavity parameter t.
struct PenaltyKind {
    enum class Family { Scad, Mcp };
    Family family;
    double t;
};

/// SCAD with t > 2 (default 3.7).
PenaltyKind scad(double t = 3.7);
/// MCP with t > 1 (default 3).
PenaltyKind mcp(double t = 3.0);

PenaltyKind penalty_from_string(const char* name, double t_override = 0.0);

struct PenaltyParams {
    double lambda; // tuning parameter, >= 0
    PenaltyKind kind;
};

/// Penalty value p_{lambda,t}(|u|); closed form, symmetric, concave on [0,inf),
/// constant for |u| >= t*lambda.
double pen_value(double u, const PenaltyParams& p);

/// First derivative on (0,inf); p'(0+) = lambda. Rejects u <= 0.
double pen_deriv(double u, const PenaltyParams& p);

/// Second derivative on (0,inf); 0 at junction points. Rejects u <= 0.
double pen_deriv2(double u, const PenaltyParams& p);

/// Soft thresholding sign(x)(|x|-lam)+.
double soft_threshold(double x, double lam);

/// Proximal map: argmin over zeta of (vartheta/2)(u-zeta)^2 + p(|zeta|).
/// Requires t > 1/vartheta (MCP) resp. t > 1/vartheta + 1 (SCAD).
double prox(double u, const PenaltyParams& p, double vartheta);

} // namespace lsir
