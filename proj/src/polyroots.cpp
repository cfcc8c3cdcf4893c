#include "vaxsir/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vaxsir {

namespace {

using cd = std::complex<double>;

/* Value and derivative of sum a[k] z^k by Horner. */
void horner2(const std::vector<double>& a, cd z, cd& val, cd& der) {
    int deg = (int)a.size() - 1;
    val = a[deg];
    der = 0.0;
    for (int k = deg - 1; k >= 0; --k) {
        der = der * z + val;
        val = val * z + a[k];
    }
}

/* Initial guesses on circles whose radii come from the upper convex hull
 * of (k, log|a_k|), Bini's Newton-polygon scheme. */
std::vector<cd> initial_guesses(const std::vector<double>& a) {
    int deg = (int)a.size() - 1;
    std::vector<int> hull;
    std::vector<std::pair<int, double>> pts;
    for (int k = 0; k <= deg; ++k)
        if (a[k] != 0.0) pts.push_back({k, std::log(std::abs(a[k]))});
    for (auto& pt : pts) {
        while (hull.size() >= 2) {
            auto& p1 = pts[hull[hull.size() - 2]];
            auto& p2 = pts[hull[hull.size() - 1]];
            double cross = (p2.first - p1.first) * (pt.second - p1.second) -
                           (pt.first - p1.first) * (p2.second - p1.second);
            if (cross >= 0.0) hull.pop_back(); else break;
        }
        hull.push_back((int)(&pt - pts.data()));
    }
    std::vector<cd> z;
    const double twist = 0.77;
    for (size_t s = 0; s + 1 < hull.size(); ++s) {
        int k0 = pts[hull[s]].first, k1 = pts[hull[s + 1]].first;
        int cnt = k1 - k0;
        double radius = std::pow(std::abs(a[k0]) / std::abs(a[k1]), 1.0 / cnt);
        for (int j = 0; j < cnt; ++j) {
            double ang = 2.0 * M_PI * (j + 0.5) / cnt + twist + 0.3 * s;
            z.push_back(radius * cd(std::cos(ang), std::sin(ang)));
        }
    }
    while ((int)z.size() < deg) z.push_back(cd(0.5, 0.5) * (double)(z.size() + 1));
    return z;
}

} // namespace

std::vector<std::complex<double>> polyroots(const Poly& p, double* max_backward_error) {
    if (p.n < 0 || p.n > 8)
        throw std::invalid_argument("polyroots: degree must lie in [0,8]");
    if (p.n > 0 && p.c[0] != 1.0)
        throw std::invalid_argument("polyroots: polynomial must be monic");
    if (max_backward_error) *max_backward_error = 0.0;
    std::vector<cd> roots;
    if (p.n == 0) return roots;

    /* a[k] multiplies z^k. */
    std::vector<double> a(p.n + 1);
    for (int k = 0; k <= p.n; ++k) a[k] = p.c[p.n - k];

    /* Exact zero roots deflate by index shift. */
    int t = 0;
    while (t < p.n && a[t] == 0.0) ++t;
    for (int i = 0; i < t; ++i) roots.push_back(cd(0.0, 0.0));
    std::vector<double> b(a.begin() + t, a.end());
    int deg = (int)b.size() - 1;

    if (deg == 1) {
        roots.push_back(cd(-b[0] / b[1], 0.0));
    } else if (deg >= 2) {
        std::vector<cd> z = initial_guesses(b);
        for (int iter = 0; iter < 1000; ++iter) {
            bool done = true;
            for (int k = 0; k < deg; ++k) {
                cd val, der;
                horner2(b, z[k], val, der);
                if (val == cd(0.0, 0.0)) continue;
                cd newton = (der == cd(0.0, 0.0)) ? cd(1e-8, 1e-8) : val / der;
                cd s(0.0, 0.0);
                for (int j = 0; j < deg; ++j) {
                    if (j == k) continue;
                    cd diff = z[k] - z[j];
                    if (diff == cd(0.0, 0.0)) diff = cd(1e-14, 1e-14);
                    s += 1.0 / diff;
                }
                cd denom = 1.0 - newton * s;
                cd corr = (std::abs(denom) > 1e-300) ? newton / denom : newton;
                z[k] -= corr;
                if (std::abs(corr) > 1e-14 * (1.0 + std::abs(z[k]))) done = false;
            }
            if (done) break;
        }
        for (auto& zi : z) roots.push_back(zi);
    }

    if (max_backward_error) {
        double worst = 0.0;
        for (auto& z : roots) {
            cd val, der;
            horner2(a, z, val, der);
            double scale = 0.0, zp = 1.0;
            for (int k = 0; k <= p.n; ++k) {
                scale += std::abs(a[k]) * zp;
                zp *= std::abs(z);
            }
            if (scale == 0.0) scale = 1.0;
            worst = std::max(worst, std::abs(val) / scale);
        }
        *max_backward_error = worst;
    }

    std::sort(roots.begin(), roots.end(), [](const cd& l, const cd& r) {
        if (l.real() != r.real()) return l.real() < r.real();
        return l.imag() < r.imag();
    });
    return roots;
}

} // namespace vaxsir
