#pragma once

#include <functional>
#include <vector>

namespace sklab::quad {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;  // estimated
    bool converged = true;
    long evaluations = 0;
};

/// Adaptive 15-point Gauss-Kronrod integration of f over [a, b].
/// Subdivides until the local error estimate meets abs_tol + rel_tol*|I|.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 60);

/// Same, but with mandatory initial subdivision at the given interior breakpoints
/// (integrand seams, sharp peaks). Breakpoints outside (a, b) are ignored.
Result integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> breakpoints,
                       double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 60);

/// Gauss-Hermite nodes/weights for int f(t) exp(-t^2) dt (physicists' weight),
/// computed by Golub-Welsch. Weights sum to sqrt(pi).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace sklab::quad
