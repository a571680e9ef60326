#pragma once

#include <functional>
#include <string>
#include <utility>

#include "rcx/poly.hpp"

namespace rcx {

/// Marchenko-Pastur parameters: support edges a = (1-sqrt(c))^2,
/// b = (1+sqrt(c))^2, and an atom of mass 1-c at 0 when c < 1.
struct MPParams {
    double c;
    double a;
    double b;
    double atom;

    static MPParams from_c(double c);
};

/// MP_c density sqrt((b-t)(t-a)) / (2 pi t) on [a, b], zero outside.
/// The atom is reported separately through MPParams.
double mp_density(double c, double t);

/// n-th MP moment: sum over NC(n) of c^{#blocks}. c may be symbolic.
Poly mp_moments(const Poly& c, int n);
double mp_moments(double c, int n);

/// Cumulative distribution of MP_c, atom included (numerical quadrature).
double mp_cdf(double c, double t);

/// Quadrature check value: integral of t^n against the density plus the
/// atom contribution, via adaptive Simpson under t = a + (b-a) sin^2(theta).
double mp_moment_quadrature(double c, int n, double tol = 1e-8);

/// Banica-Nechita parameters of the free difference:
/// c1 = c d1 (d1+1)/2, c2 = c d1 (d1-1)/2.
std::pair<Poly, Poly> bn_parameters(const Poly& c, int d1);

/// Cumulant sequence given by a rule n -> value.
struct CumulantSequence {
    std::function<Poly(int)> rule;
};

/// kappa_n = c1 + (-1)^n c2, the free difference of MP_{c1} and MP_{c2}.
CumulantSequence free_difference_cumulants(const Poly& c1, const Poly& c2);

/// Moments of the shifted semicircle with kappa_1 = kappa_2 = c and all
/// higher cumulants zero.
double aubrun_semicircle_moments(double c, int n);

/// Two-column CSV (t, density) sampled uniformly on [a, b].
std::string mp_density_csv(double c, int samples);

}  // namespace rcx
