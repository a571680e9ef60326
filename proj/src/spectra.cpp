#include "rcx/spectra.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rcx/cumulant_core.hpp"

namespace rcx {

MPParams MPParams::from_c(double c) {
    if (c <= 0) throw std::invalid_argument("MPParams: c must be positive");
    MPParams p;
    p.c = c;
    double s = std::sqrt(c);
    p.a = (1 - s) * (1 - s);
    p.b = (1 + s) * (1 + s);
    p.atom = std::max(0.0, 1.0 - c);
    return p;
}

double mp_density(double c, double t) {
    MPParams p = MPParams::from_c(c);
    if (t <= p.a || t >= p.b) return 0.0;
    if (t <= 0) return 0.0;
    return std::sqrt((p.b - t) * (t - p.a)) / (2 * std::numbers::pi * t);
}

Poly mp_moments(const Poly& c, int n) {
    CumulantSpec k{[&c](const HandleWord&) { return c; }};
    return cumulants_to_moments(k, HandleWord(static_cast<std::size_t>(n), 0));
}

double mp_moments(double c, int n) {
    const NCTable& t = nc_table(n);
    double acc = 0;
    for (const auto& pi : t.partitions) acc += std::pow(c, pi.num_blocks());
    return acc;
}

namespace {

double simpson(const std::function<double(double)>& f, double lo, double hi, double flo,
               double fmid, double fhi, double whole, double tol, int depth, int min_depth) {
    double mid = 0.5 * (lo + hi);
    double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    double flm = f(lm), frm = f(rm);
    double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
    double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
    // min_depth forces initial subdivisions: trigonometric integrands can
    // alias on the first equally spaced samples and fool the error estimate
    if (depth <= 0 || (min_depth <= 0 && std::abs(left + right - whole) < 15 * tol))
        return left + right + (left + right - whole) / 15;
    return simpson(f, lo, mid, flo, flm, fmid, left, tol / 2, depth - 1, min_depth - 1) +
           simpson(f, mid, hi, fmid, frm, fhi, right, tol / 2, depth - 1, min_depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double tol) {
    double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    double whole = (hi - lo) / 6 * (flo + 4 * fmid + fhi);
    return simpson(f, lo, hi, flo, fmid, fhi, whole, tol, 40, 5);
}

// integral over [a,b] of g(t) * density(t) dt with the square-root edge
// singularities removed by t = a + (b-a) sin^2(theta)
double mp_integral(double c, const std::function<double(double)>& g, double tol) {
    MPParams p = MPParams::from_c(c);
    auto integrand = [&](double theta) {
        double s2 = std::sin(theta) * std::sin(theta);
        double t = p.a + (p.b - p.a) * s2;
        if (t <= 0) return 0.0;
        // dt = (b-a) sin(2 theta) dtheta; sqrt((b-t)(t-a)) = (b-a) sin cos
        double sincos = std::sin(theta) * std::cos(theta);
        double w = (p.b - p.a) * (p.b - p.a) * 2 * sincos * sincos /
                   (2 * std::numbers::pi * t);
        return g(t) * w;
    };
    return adaptive_simpson(integrand, 0.0, std::numbers::pi / 2, tol);
}

}  // namespace

double mp_moment_quadrature(double c, int n, double tol) {
    double cont = mp_integral(c, [n](double t) { return std::pow(t, n); }, tol);
    // the atom sits at zero and contributes only to the 0th moment
    return n == 0 ? cont + std::max(0.0, 1.0 - c) : cont;
}

double mp_cdf(double c, double t) {
    MPParams p = MPParams::from_c(c);
    double acc = t >= 0 ? p.atom : 0.0;
    if (t <= p.a) return acc;
    double hi = std::min(t, p.b);
    // integrate the density up to hi under the same substitution
    double theta_hi = std::asin(std::sqrt((hi - p.a) / (p.b - p.a)));
    auto integrand = [&](double theta) {
        double s2 = std::sin(theta) * std::sin(theta);
        double x = p.a + (p.b - p.a) * s2;
        if (x <= 0) return 0.0;
        double sincos = std::sin(theta) * std::cos(theta);
        return (p.b - p.a) * (p.b - p.a) * 2 * sincos * sincos /
               (2 * std::numbers::pi * x);
    };
    return acc + adaptive_simpson(integrand, 0.0, theta_hi, 1e-9);
}

std::pair<Poly, Poly> bn_parameters(const Poly& c, int d1) {
    if (d1 < 1) throw std::invalid_argument("bn_parameters: d1 must be positive");
    Poly c1 = c.scaled(Rational(static_cast<std::int64_t>(d1) * (d1 + 1), 2));
    Poly c2 = c.scaled(Rational(static_cast<std::int64_t>(d1) * (d1 - 1), 2));
    return {c1, c2};
}

CumulantSequence free_difference_cumulants(const Poly& c1, const Poly& c2) {
    return CumulantSequence{[c1, c2](int n) { return (n % 2 == 0) ? c1 + c2 : c1 - c2; }};
}

double aubrun_semicircle_moments(double c, int n) {
    Poly sym = Poly::symbol("c");
    CumulantSpec k{[&sym](const HandleWord& w) {
        return w.size() <= 2 ? sym : Poly();
    }};
    Poly m = cumulants_to_moments(k, HandleWord(static_cast<std::size_t>(n), 0));
    return m.eval({{"c", c}});
}

std::string mp_density_csv(double c, int samples) {
    if (samples < 2) throw std::invalid_argument("mp_density_csv: need at least two samples");
    MPParams p = MPParams::from_c(c);
    std::ostringstream os;
    os.precision(12);
    os << "t,density\n";
    for (int i = 0; i < samples; ++i) {
        double t = p.a + (p.b - p.a) * i / (samples - 1);
        os << t << ',' << mp_density(c, t) << '\n';
    }
    return os.str();
}

}  // namespace rcx
