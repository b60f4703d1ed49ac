#include "emapr/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace emapr {

namespace {

// Orbit totals; a point orbit of size m shares its total weight equally.
void add_centroid(QuadratureRule& r, double w) {
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(w);
}

void add_orbit3(QuadratureRule& r, double a, double w) {
    const double c = 1.0 - 2.0 * a;
    for (const Bary& p : {Bary{a, a, c}, Bary{a, c, a}, Bary{c, a, a}}) {
        r.points.push_back(p);
        r.weights.push_back(w / 3.0);
    }
}

void add_orbit6(QuadratureRule& r, double a, double b, double w) {
    const double c = 1.0 - a - b;
    for (const Bary& p : {Bary{a, b, c}, Bary{a, c, b}, Bary{b, a, c}, Bary{b, c, a}, Bary{c, a, b}, Bary{c, b, a}}) {
        r.points.push_back(p);
        r.weights.push_back(w / 6.0);
    }
}

QuadratureRule make_rule(int degree) {
    QuadratureRule r;
    switch (degree) {
        case 1:
            add_centroid(r, 1.0);
            r.degree = 1;
            break;
        case 2:
            add_orbit3(r, 1.0 / 6.0, 1.0);
            r.degree = 2;
            break;
        case 4:
            add_orbit3(r, 0.44594849091596488632, 0.67014476903403439709);
            add_orbit3(r, 0.09157621350977074346, 0.32985523096596560291);
            r.degree = 4;
            break;
        case 5:
            add_centroid(r, 0.225);
            add_orbit3(r, 0.47014206410511508977, 0.39718245836551854221);
            add_orbit3(r, 0.10128650732345633880, 0.37781754163448145779);
            r.degree = 5;
            break;
        case 6:
            add_orbit3(r, 0.24928674517091042129, 0.35035882717913809808);
            add_orbit3(r, 0.06308901449150222834, 0.15253471911062045076);
            add_orbit6(r, 0.053145049844816947353, 0.31035245103378440542, 0.49710645371024145116);
            r.degree = 6;
            break;
        case 8:
            add_centroid(r, 0.14431560767778716825);
            add_orbit3(r, 0.45929258829272315603, 0.28527490280185387438);
            add_orbit3(r, 0.17056930775176020662, 0.30965211160415475085);
            add_orbit3(r, 0.050547228317030975458, 0.097375492869594240933);
            add_orbit6(r, 0.0083947774099576053372, 0.26311282963463811342, 0.16338188504660996559);
            r.degree = 8;
            break;
        case 10:
            add_centroid(r, 0.090817990382753580095);
            add_orbit3(r, 0.48557763338365737737, 0.11017787326940011415);
            add_orbit3(r, 0.1094815754850370548, 0.13596317830658380435);
            add_orbit6(r, 0.14170721941487995476, 0.30793983876412095017, 0.43654750107252065163);
            add_orbit6(r, 0.025003534762686386074, 0.24667256063990269392, 0.16996345518634490902);
            add_orbit6(r, 0.0095408154002994575802, 0.066803251012200265774, 0.05653000178239694076);
            r.degree = 10;
            break;
        default:
            throw std::logic_error("quadrature: no tabulated rule");
    }
    return r;
}

int tabulated_degree(int degree) {
    if (degree <= 1) return 1;
    if (degree == 2) return 2;
    if (degree <= 4) return 4;
    if (degree == 5) return 5;
    if (degree == 6) return 6;
    if (degree <= 8) return 8;
    return 10;
}

LineRule make_gauss_legendre(int n) {
    LineRule r;
    r.points.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // map from [-1,1] to [0,1]
        r.points[n - 1 - i] = 0.5 * (x + 1.0);
        r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const QuadratureRule& quadrature_rule(int degree) {
    if (degree < 1 || degree > 10) throw std::invalid_argument("quadrature_rule: supported degrees are 1..10");
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    const int d = tabulated_degree(degree);
    std::lock_guard lock(mutex);
    auto it = cache.find(d);
    if (it == cache.end()) it = cache.emplace(d, make_rule(d)).first;
    return it->second;
}

const LineRule& gauss_legendre(int n) {
    if (n < 1 || n > 32) throw std::invalid_argument("gauss_legendre: supported point counts are 1..32");
    static std::mutex mutex;
    static std::map<int, LineRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

}  // namespace emapr
