#pragma once
// Gauss-Legendre nodes/weights via Newton iteration on the Legendre
// recurrence, mapped to [a, b].

#include <cmath>
#include <utility>
#include <vector>

namespace defport {

struct GaussLegendre {
  std::vector<double> x;  // nodes on [a, b]
  std::vector<double> w;

  GaussLegendre(int n, double a, double b) {
    x.resize(n);
    w.resize(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      // Tricomi-style initial guess, then Newton
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      x[i] = mid - half * z;
      x[n - 1 - i] = mid + half * z;
      w[i] = 2.0 * half / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
    return s;
  }
};

}  // namespace defport
