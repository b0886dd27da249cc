#include "anisogauge/field.hpp"

#include <cmath>
#include <stdexcept>

namespace anisogauge {

RadialProfile make_profile(const std::string& name, double gamma) {
    std::string base = name;
    if (auto pos = name.find(':'); pos != std::string::npos) {
        base = name.substr(0, pos);
        gamma = std::stod(name.substr(pos + 1));
    }
    RadialProfile p;
    if (base == "identity") {
        p = {[](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; },
             "identity", false};
    } else if (base == "square") {
        p = {[](double t) { return t * t; }, [](double t) { return 2.0 * t; },
             [](double) { return 2.0; }, "square", false};
    } else if (base == "log") {
        p = {[](double t) { return std::log(t); }, [](double t) { return 1.0 / t; },
             [](double t) { return -1.0 / (t * t); }, "log", true};
    } else if (base == "power") {
        p = {[gamma](double t) { return std::pow(t, gamma); },
             [gamma](double t) { return gamma * std::pow(t, gamma - 1.0); },
             [gamma](double t) { return gamma * (gamma - 1.0) * std::pow(t, gamma - 2.0); },
             "power:" + std::to_string(gamma), gamma < 0.0};
    } else {
        throw std::invalid_argument("make_profile: unknown profile '" + name + "'");
    }
    return p;
}

RadialProfile combine_profiles(double a, const RadialProfile& f1, double b,
                               const RadialProfile& f2) {
    RadialProfile p;
    p.f = [a, f1, b, f2](double t) { return a * f1.f(t) + b * f2.f(t); };
    p.df = [a, f1, b, f2](double t) { return a * f1.df(t) + b * f2.df(t); };
    p.ddf = [a, f1, b, f2](double t) { return a * f1.ddf(t) + b * f2.ddf(t); };
    p.name = f1.name + "+" + f2.name;
    p.singular_at_zero = f1.singular_at_zero || f2.singular_at_zero;
    return p;
}

} // namespace anisogauge
