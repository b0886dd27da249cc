#include "anisogauge/fd.hpp"

namespace anisogauge {
namespace fd {

Vector gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
    Vector g(x.size());
    Vector p = x;
    for (int i = 0; i < x.size(); ++i) {
        const double hi = scaled_step(h, x[i]);
        p[i] = x[i] + hi;
        const double fp = f(p);
        p[i] = x[i] - hi;
        const double fm = f(p);
        p[i] = x[i];
        g[i] = (fp - fm) / (2.0 * hi);
    }
    return g;
}

double divergence(const std::function<Vector(const Vector&)>& field, const Vector& x, double h) {
    double div = 0.0;
    Vector p = x;
    for (int i = 0; i < x.size(); ++i) {
        const double hi = scaled_step(h, x[i]);
        p[i] = x[i] + hi;
        const double fp = field(p)[i];
        p[i] = x[i] - hi;
        const double fm = field(p)[i];
        p[i] = x[i];
        div += (fp - fm) / (2.0 * hi);
    }
    return div;
}

double divergence_richardson(const std::function<Vector(const Vector&)>& field, const Vector& x,
                             double h) {
    const double coarse = divergence(field, x, h);
    const double fine = divergence(field, x, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

} // namespace fd
} // namespace anisogauge
