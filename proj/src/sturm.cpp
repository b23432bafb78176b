#include "maglev/sturm.hpp"

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "maglev/error.hpp"

namespace maglev {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using Poly = std::vector<Rational>;  // ascending powers, no trailing zeros

Rational exact(double x) {
    int exponent = 0;
    const double mantissa = std::frexp(x, &exponent);
    // mantissa * 2^53 is an integer for every finite double.
    const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    Rational r(scaled);
    exponent -= 53;
    if (exponent >= 0) {
        r *= Rational(boost::multiprecision::cpp_int(1) << exponent);
    } else {
        r /= Rational(boost::multiprecision::cpp_int(1) << (-exponent));
    }
    return r;
}

void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) {
        p.pop_back();
    }
}

Poly derivative(const Poly& p) {
    Poly d;
    for (std::size_t k = 1; k < p.size(); ++k) {
        d.push_back(p[k] * static_cast<long long>(k));
    }
    trim(d);
    return d;
}

// Remainder of a / b (b nonzero).
Poly remainder(Poly a, const Poly& b) {
    const std::size_t db = b.size() - 1;
    while (a.size() >= b.size()) {
        const Rational factor = a.back() / b.back();
        const std::size_t shift = a.size() - b.size();
        for (std::size_t k = 0; k <= db; ++k) {
            a[shift + k] -= factor * b[k];
        }
        a.pop_back();
        trim(a);
    }
    return a;
}

int sign(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Sign of p at -inf / +inf.
int sign_at_infinity(const Poly& p, bool positive) {
    const int lead = sign(p.back());
    const bool odd = (p.size() - 1) % 2 == 1;
    return (positive || !odd) ? lead : -lead;
}

int sign_changes(const std::vector<Poly>& chain, bool positive) {
    int changes = 0;
    int previous = 0;
    for (const auto& p : chain) {
        const int s = sign_at_infinity(p, positive);
        if (s != 0 && previous != 0 && s != previous) {
            ++changes;
        }
        if (s != 0) {
            previous = s;
        }
    }
    return changes;
}

}  // namespace

int sturm_real_root_count(std::span<const double> coeffs) {
    Poly p;
    p.reserve(coeffs.size());
    for (double c : coeffs) {
        if (!std::isfinite(c)) {
            throw Error(ErrorCode::InvalidArgument, "Sturm chain needs finite coefficients");
        }
        p.push_back(exact(c));
    }
    trim(p);
    if (p.empty()) {
        throw Error(ErrorCode::InvalidArgument, "Sturm chain of the zero polynomial");
    }
    if (p.size() == 1) {
        return 0;
    }

    std::vector<Poly> chain{p, derivative(p)};
    while (chain.back().size() > 1) {
        Poly r = remainder(chain[chain.size() - 2], chain.back());
        if (r.empty()) {
            break;  // last entry is the gcd; distinct-root count is unaffected
        }
        for (auto& c : r) {
            c = -c;
        }
        chain.push_back(std::move(r));
    }
    return sign_changes(chain, false) - sign_changes(chain, true);
}

}  // namespace maglev
