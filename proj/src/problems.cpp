#include "emapr/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace emapr {

namespace {

Vec2 grad_chi(const Vec2& x) {
    const double a = x.x(), b = x.y();
    return {3.0 * a * a * b - b * b * b, a * a * a - 3.0 * a * b * b};
}

Mat2 hess_chi(const Vec2& x) {
    const double a = x.x(), b = x.y();
    Mat2 h;
    h << 6.0 * a * b, 3.0 * a * a - 3.0 * b * b, 3.0 * a * a - 3.0 * b * b, -6.0 * a * b;
    return h;
}

double chi(const Vec2& x) { return x.x() * x.x() * x.x() * x.y() - x.y() * x.y() * x.y() * x.x(); }

constexpr double kInner = 0.2;
constexpr double kOuter = 0.4;

}  // namespace

ExactSolution potential_flow(double nu, double gradient_amplitude) {
    ExactSolution e;
    e.nu = nu;
    e.T = 0.1;
    e.domain = {0.0, 0.0, 1.0, 1.0};
    e.u = [](double t, const Vec2& x) -> Vec2 { return std::min(t, 1.0) * grad_chi(x); };
    e.grad_u = [](double t, const Vec2& x) -> Mat2 { return std::min(t, 1.0) * hess_chi(x); };
    e.p = [gradient_amplitude](double t, const Vec2& x) {
        const double s = std::min(t, 1.0);
        const double r2 = x.squaredNorm();
        // mean of |grad chi|^2 = r^6 over the unit square is 24/35; chi has zero mean
        return (gradient_amplitude - (t < 1.0 ? 1.0 : 0.0)) * chi(x) - 0.5 * s * s * (r2 * r2 * r2 - 24.0 / 35.0);
    };
    if (gradient_amplitude != 0.0) {
        e.f = [gradient_amplitude](double, const Vec2& x) -> Vec2 { return gradient_amplitude * grad_chi(x); };
        e.steady_forcing = true;
    }
    return e;
}

double gresho_pressure(const Vec2& x) {
    const double r = x.norm();
    const double beta = -12.5 * kOuter * kOuter + 20.0 * kOuter * kOuter - 4.0 * std::log(kOuter);
    const double gamma = beta - 20.0 * kInner + 4.0 * std::log(kInner);
    if (r <= kInner) return 12.5 * r * r + gamma;
    if (r <= kOuter) return 12.5 * r * r - 20.0 * r + 4.0 * std::log(r) + beta;
    return 0.0;
}

ExactSolution gresho() {
    ExactSolution e;
    e.nu = 0.0;
    e.T = 10.0;
    e.domain = {-0.5, -0.5, 0.5, 0.5};
    e.u = [](double, const Vec2& x) -> Vec2 {
        const double r = x.norm();
        if (r <= kInner) return {-5.0 * x.y(), 5.0 * x.x()};
        if (r <= kOuter) return {-2.0 * x.y() / r + 5.0 * x.y(), 2.0 * x.x() / r - 5.0 * x.x()};
        return Vec2::Zero();
    };
    e.grad_u = [](double, const Vec2& x) -> Mat2 {
        const double r = x.norm();
        Mat2 g = Mat2::Zero();
        if (r <= kInner) {
            g << 0.0, -5.0, 5.0, 0.0;
        } else if (r <= kOuter) {
            const double r3 = r * r * r;
            const double a = x.x(), b = x.y();
            g << 2.0 * a * b / r3, -2.0 / r + 2.0 * b * b / r3 + 5.0, 2.0 / r - 2.0 * a * a / r3 - 5.0,
                -2.0 * a * b / r3;
        }
        return g;
    };
    e.p = [](double, const Vec2& x) { return gresho_pressure(x); };
    return e;
}

ExactSolution lattice_vortex(double nu) {
    using std::numbers::pi;
    ExactSolution e;
    e.nu = nu;
    e.T = 10.0;
    e.domain = {0.0, 0.0, 1.0, 1.0};
    e.u = [nu](double t, const Vec2& x) -> Vec2 {
        const double d = std::exp(-8.0 * pi * pi * nu * t);
        const double sx = std::sin(2 * pi * x.x()), cx = std::cos(2 * pi * x.x());
        const double sy = std::sin(2 * pi * x.y()), cy = std::cos(2 * pi * x.y());
        return d * Vec2(sx * sy, cx * cy);
    };
    e.grad_u = [nu](double t, const Vec2& x) -> Mat2 {
        const double d = 2 * pi * std::exp(-8.0 * pi * pi * nu * t);
        const double sx = std::sin(2 * pi * x.x()), cx = std::cos(2 * pi * x.x());
        const double sy = std::sin(2 * pi * x.y()), cy = std::cos(2 * pi * x.y());
        Mat2 g;
        g << cx * sy, sx * cy, -sx * cy, -cx * sy;
        return d * g;
    };
    e.p = [nu](double t, const Vec2& x) {
        return 0.25 * (std::cos(4 * pi * x.x()) - std::cos(4 * pi * x.y())) * std::exp(-16.0 * pi * pi * nu * t);
    };
    return e;
}

namespace {

struct G {
    double v, d1, d2, d3;
};

G g_of(double s) {
    return {s * s * (1 - s) * (1 - s), 2 * s - 6 * s * s + 4 * s * s * s, 2 - 12 * s + 12 * s * s, -12 + 24 * s};
}

Vec2 curl_psi(const Vec2& x) {
    const G gx = g_of(x.x()), gy = g_of(x.y());
    return {gx.v * gy.d1, -gx.d1 * gy.v};
}

Mat2 grad_curl_psi(const Vec2& x) {
    const G gx = g_of(x.x()), gy = g_of(x.y());
    Mat2 m;
    m << gx.d1 * gy.d1, gx.v * gy.d2, -gx.d2 * gy.v, -gx.d1 * gy.d1;
    return m;
}

Vec2 laplace_curl_psi(const Vec2& x) {
    const G gx = g_of(x.x()), gy = g_of(x.y());
    return {gx.d2 * gy.d1 + gx.v * gy.d3, -gx.d3 * gy.v - gx.d1 * gy.d2};
}

}  // namespace

ExactSolution manufactured(double nu) {
    ExactSolution e;
    e.nu = nu;
    e.T = 0.5;
    e.domain = {0.0, 0.0, 1.0, 1.0};
    e.u = [](double t, const Vec2& x) -> Vec2 { return (1.0 + t) * curl_psi(x); };
    e.grad_u = [](double t, const Vec2& x) -> Mat2 { return (1.0 + t) * grad_curl_psi(x); };
    e.p = [](double t, const Vec2& x) {
        return (1.0 + t) * (1.0 + t) * (x.x() * x.x() * x.x() + x.y() * x.y() * x.y() - 0.5);
    };
    e.f = [nu](double t, const Vec2& x) -> Vec2 {
        const double th = 1.0 + t;
        const Vec2 w = curl_psi(x);
        const Vec2 conv = grad_curl_psi(x) * w;
        const Vec2 gp(3.0 * x.x() * x.x(), 3.0 * x.y() * x.y());
        return w - nu * th * laplace_curl_psi(x) + th * th * (conv + gp);
    };
    return e;
}

}  // namespace emapr
