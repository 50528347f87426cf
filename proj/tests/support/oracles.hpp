#pragma once

// Test-only oracles, independent of the code paths they check:
// central finite differences for gradients, antiderivatives for
// polynomial integrals, and a generator of random smooth expressions.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gmt/expr.hpp"

namespace oracles {

// Central finite differences with step 1e-6, the differentiation oracle.
inline std::vector<double> finite_difference_gradient(const gmt::Expression& e,
                                                      std::vector<double> point,
                                                      double step = 1e-6) {
    std::vector<double> grad(point.size());
    for (std::size_t k = 0; k < point.size(); ++k) {
        const double saved = point[k];
        point[k] = saved + step;
        const double hi = gmt::eval(e, point);
        point[k] = saved - step;
        const double lo = gmt::eval(e, point);
        point[k] = saved;
        grad[k] = (hi - lo) / (2.0 * step);
    }
    return grad;
}

// Exact integral over [a, b] of a polynomial given by coefficients
// c[0] + c[1] x + c[2] x^2 + ...
inline double polynomial_integral(const std::vector<double>& coeffs, double a, double b) {
    double total = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double p = static_cast<double>(k) + 1.0;
        total += coeffs[k] * (std::pow(b, p) - std::pow(a, p)) / p;
    }
    return total;
}

inline std::string polynomial_source(const std::vector<double>& coeffs,
                                     const std::string& var = "x1") {
    std::string src;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (!src.empty()) src += " + ";
        src += gmt::detail::format_double(coeffs[k]);
        if (k >= 1) src += "*" + var;
        if (k >= 2) src += "^" + std::to_string(k);
    }
    return src.empty() ? "0" : src;
}

// Random expressions built only from pieces that stay smooth and
// bounded on |x| <= 2: risky functions get shifted positive arguments,
// exp gets a sin-compressed argument, so every sample point is away
// from singularities by construction.
class SmoothExprGen {
public:
    SmoothExprGen(std::mt19937_64& rng, int arity) : rng_(rng), arity_(arity) {}

    std::string generate(int depth = 3) { return gen(depth); }

private:
    std::string coord() {
        std::uniform_int_distribution<int> pick(1, arity_);
        return "x" + std::to_string(pick(rng_));
    }

    std::string literal() {
        std::uniform_real_distribution<double> val(-2.0, 2.0);
        const double v = val(rng_);
        return v < 0.0 ? "(" + gmt::detail::format_double(v) + ")"
                       : gmt::detail::format_double(v);
    }

    std::string gen(int depth) {
        std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
        switch (pick(rng_)) {
            case 0: return coord();
            case 1: return literal();
            case 2: return "(" + gen(depth - 1) + " + " + gen(depth - 1) + ")";
            case 3: return "(" + gen(depth - 1) + " - " + gen(depth - 1) + ")";
            case 4: return "(" + gen(depth - 1) + ")*(" + gen(depth - 1) + ")";
            case 5: return "sin(" + gen(depth - 1) + ")";
            case 6: return "cos(" + gen(depth - 1) + ")";
            case 7: return "exp(sin(" + gen(depth - 1) + "))";
            case 8: return "(" + gen(depth - 1) + ")/(2 + (" + gen(depth - 1) + ")^2)";
            case 9: return "sqrt(2 + (" + gen(depth - 1) + ")^2)";
        }
        return coord();
    }

    std::mt19937_64& rng_;
    int arity_;
};

} // namespace oracles
