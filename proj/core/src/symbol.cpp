#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "elastoborn/calculus.hpp"

namespace elastoborn {

SymbolPolynomial::SymbolPolynomial(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

void SymbolPolynomial::normalize() {
    std::map<MultiIndex, double> acc;
    for (const auto& [b, c] : terms_) acc[b] += c;
    terms_.clear();
    for (const auto& [b, c] : acc)
        if (c != 0.0) terms_.emplace_back(b, c);
    elliptic_ = -1;
}

bool SymbolPolynomial::elliptic() const {
    int e = elliptic_.load();
    if (e < 0) {
        e = check_elliptic(*this) ? 1 : 0;
        elliptic_.store(e);
    }
    return e == 1;
}

SymbolPolynomial SymbolPolynomial::constant(double c) { return SymbolPolynomial({{MultiIndex{0, 0, 0}, c}}); }

SymbolPolynomial SymbolPolynomial::partial(const MultiIndex& beta, double c) { return SymbolPolynomial({{beta, c}}); }

SymbolPolynomial SymbolPolynomial::laplacian() {
    return SymbolPolynomial({{{2, 0, 0}, 1.0}, {{0, 2, 0}, 1.0}, {{0, 0, 2}, 1.0}});
}

SymbolPolynomial SymbolPolynomial::bilaplacian() { return laplacian() * laplacian(); }

SymbolPolynomial SymbolPolynomial::directional(const Axis& theta) {
    MultiIndex b{0, 0, 0};
    b[theta.axis] = 1;
    return SymbolPolynomial({{b, double(theta.sign)}});
}

std::complex<double> SymbolPolynomial::operator()(const std::array<double, 3>& xi) const {
    std::complex<double> s = 0.0;
    for (const auto& [b, c] : terms_) {
        std::complex<double> t = c;
        for (int a = 0; a < 3; ++a)
            for (int k = 0; k < b[a]; ++k) t *= std::complex<double>(0.0, xi[a]);
        s += t;
    }
    return s;
}

int SymbolPolynomial::order() const {
    int o = 0;
    for (const auto& t : terms_) o = std::max(o, t.first[0] + t.first[1] + t.first[2]);
    return o;
}

SymbolPolynomial SymbolPolynomial::operator+(const SymbolPolynomial& o) const {
    auto t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return SymbolPolynomial(std::move(t));
}

SymbolPolynomial SymbolPolynomial::operator-(const SymbolPolynomial& o) const { return *this + o * -1.0; }

SymbolPolynomial SymbolPolynomial::operator*(const SymbolPolynomial& o) const {
    std::vector<Term> t;
    for (const auto& [b1, c1] : terms_)
        for (const auto& [b2, c2] : o.terms_)
            t.emplace_back(MultiIndex{b1[0] + b2[0], b1[1] + b2[1], b1[2] + b2[2]}, c1 * c2);
    return SymbolPolynomial(std::move(t));
}

SymbolPolynomial SymbolPolynomial::operator*(double s) const {
    auto t = terms_;
    for (auto& x : t) x.second *= s;
    return SymbolPolynomial(std::move(t));
}

std::string SymbolPolynomial::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [b, c] : terms_) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        os << std::abs(c);
        for (int a = 0; a < 3; ++a)
            if (b[a]) os << "*d" << (a + 1) << (b[a] > 1 ? "^" + std::to_string(b[a]) : "");
    }
    return first ? "0" : os.str();
}

// Fails on a sign change of a real symbol, or min|p| <= 1e-3 max|p| at any radius.
bool check_elliptic(const SymbolPolynomial& p) {
    if (p.terms().empty()) return false;
    bool real_valued = true;
    for (const auto& t : p.terms())
        if ((t.first[0] + t.first[1] + t.first[2]) % 2) real_valued = false;
    constexpr int n = 3400;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (double r : {0.5, 1.0, 2.0}) {
        double pmin = INFINITY, pmax = 0.0;
        int pos = 0, neg = 0;
        for (int i = 0; i < n; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / n, rho = std::sqrt(1.0 - z * z), phi = golden * i;
            std::complex<double> v = p({r * rho * std::cos(phi), r * rho * std::sin(phi), r * z});
            double m = std::abs(v);
            pmin = std::min(pmin, m);
            pmax = std::max(pmax, m);
            if (real_valued) (v.real() > 0 ? pos : neg)++;
        }
        if (pmax == 0.0 || pmin <= 1e-3 * pmax) return false;
        if (real_valued && pos && neg) return false;
    }
    return true;
}

}  // namespace elastoborn
