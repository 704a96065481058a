#include <doctest.h>

#include <random>

#include "elastoborn/error.hpp"
#include "elastoborn/expansion.hpp"
#include "elastoborn/iso.hpp"
#include "helpers.hpp"
#include "oracle_values.hpp"

using namespace elastoborn;

namespace {

const ScalarField& S(const AnyField& f) { return std::get<ScalarField>(f); }
const VectorField& V(const AnyField& f) { return std::get<VectorField>(f); }

bool all_zero(const AnyField& f) {
    if (auto* s = std::get_if<ScalarField>(&f)) return s->is_zero();
    const auto& v = std::get<VectorField>(f);
    return v[0].is_zero() && v[1].is_zero() && v[2].is_zero();
}

Perturbation random_perturbation(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Perturbation P(g);
    for (int s = 0; s < kVoigtSlots; ++s) P.C.slot(s) = bump_field(g, random_bumps(rng));
    P.rho = bump_field(g, random_bumps(rng));
    return P;
}

std::vector<ExpansionResult> all_channels(const Perturbation& P, const Background& bg, const ExpansionOptions& o = {}) {
    const Axis e1{0, 1}, e2{1, 1};
    return {pp_expansion(P, bg, e1, o), sp_expansion(P, bg, e1, e2, o), ps_expansion(P, bg, e1, o),
            ss_expansion(P, bg, e1, e2, o)};
}

}  // namespace

TEST_SUITE("expansion_engine") {

TEST_CASE("channels") {
    CHECK(parse_channel("pp", {0, 1}).name() == "pp");
    CHECK(parse_channel("ss", {0, 1}, Axis{1, 1}).alpha.has_value());
    CHECK_THROWS_AS(parse_channel("px", {0, 1}), Error);
    CHECK_THROWS_AS(parse_channel("sp", {0, 1}), Error);
    CHECK_THROWS_AS(parse_channel("ss", {0, 1}, Axis{0, -1}), Error);
    CHECK_NOTHROW(parse_channel("ps", {2, -1}));
}

TEST_CASE("zero perturbation gives zero coefficients") {
    Grid g(16, 2.0);
    for (const auto& E : all_channels(Perturbation(g), Background(2.0, 1.0))) {
        for (const auto& c : E.coefficients) CHECK(all_zero(c.field));
        CHECK(all_zero(E.front_identity));
        for (auto [name, r] : residual_report(E)) CHECK(r == 0.0);
    }
}

TEST_CASE("pp w2 from density alone matches line quadrature") {
    Grid g(128, 2.0);
    Perturbation P(g);
    P.rho = th::bump(g, {0, 0, 0}, 0.9);
    ExpansionOptions o;
    o.rule = RayRule::fourier;
    auto E = pp_expansion(P, Background(2.0, 1.0), {0, 1}, o);
    const auto& w2 = S(E.coefficient("w2").field);
    const auto& p = oracle::kLinePoints_N128;
    for (std::size_t n = 0; n < oracle::kLineIntegral_N128.size(); ++n)
        CHECK(w2.at(p[3 * n], p[3 * n + 1], p[3 * n + 2]) ==
              doctest::Approx(0.5 * oracle::kLineIntegral_N128[n]).epsilon(1e-6));
}

TEST_CASE("pp leading transport for isotropic perturbations") {
    Grid g(48, 2.0);
    auto T = random_triple(g, 4);
    const Background bg(2.0, 1.0);
    auto E = pp_expansion(make_isotropic(T.lambda, T.mu, T.rho), bg, {0, 1});
    const auto& w2 = S(E.coefficient("w2").field);
    auto F2 = T.lambda + 2.0 * T.mu - bg.cp2() * T.rho;
    CHECK(relative_residual({2 * bg.cp2() * ray_derivative(w2, {0, 1}), F2}, {}) <= 1e-8);
}

TEST_CASE("sp leading coefficient") {
    Grid g(32, 2.0);
    const Background bg(2.0, 1.0);
    auto B = th::bump(g, {0.1, 0, 0}, 0.5);
    Perturbation P(g);
    P.C.voigt_component(1, 6) = B;
    auto E = sp_expansion(P, bg, {0, 1}, {1, 1});
    CHECK(th::max_diff(S(E.coefficient("w1").field), (1.0 / 3.0) * B) <= 1e-15);

    auto T = random_triple(g, 2);
    auto I = sp_expansion(make_isotropic(T.lambda, T.mu, T.rho), bg, {0, 1}, {1, 1});
    CHECK(S(I.coefficient("w1").field).is_zero());
}

TEST_CASE("ps leading coefficient") {
    Grid g(32, 2.0);
    const Background bg(2.0, 1.0);
    auto B = th::bump(g, {0.1, 0, 0}, 0.5);
    Perturbation P(g);
    P.C.voigt_component(6, 1) = B;  // c2111
    auto E = ps_expansion(P, bg, {0, 1});
    const auto& w1 = V(E.coefficient("w1").field);
    // direct index sum: (cp^2 - cs^2) w1_i = -e_ipq c_pjkl th_j th_k th_l th_q, th = e1
    for (int i = 0; i < 3; ++i) {
        ScalarField want(g);
        for (int p = 0; p < 3; ++p) {
            const int e = levi(i, p, 0);
            if (e) want.axpy(-e / (bg.cp2() - bg.cs2()), P.C(p, 0, 0, 0));
        }
        CHECK(th::max_diff(w1[i], want) <= 1e-15);
    }
    CHECK(th::max_diff(w1[2], (1.0 / 3.0) * B) <= 1e-15);
    CHECK(w1[0].is_zero());
    CHECK(w1[1].is_zero());

    auto T = random_triple(g, 2);
    auto I = ps_expansion(make_isotropic(T.lambda, T.mu, T.rho), bg, {2, -1});
    CHECK(all_zero(I.coefficient("w1").field));
}

TEST_CASE("ss w2 from density alone") {
    Grid g(128, 2.0);
    Perturbation P(g);
    P.rho = th::bump(g, {0, 0, 0}, 0.9);
    ExpansionOptions o;
    o.rule = RayRule::fourier;
    auto E = ss_expansion(P, Background(2.0, 1.0), {0, 1}, {1, 1}, o);
    const auto& w2 = V(E.coefficient("w2").field);
    CHECK(w2[0].is_zero());
    CHECK(w2[1].is_zero());
    const auto& p = oracle::kLinePoints_N128;
    for (std::size_t n = 0; n < oracle::kLineIntegral_N128.size(); ++n)
        CHECK(w2[2].at(p[3 * n], p[3 * n + 1], p[3 * n + 2]) ==
              doctest::Approx(-0.5 * oracle::kLineIntegral_N128[n]).epsilon(1e-6));
}

TEST_CASE("ss front identity against the isotropic S sources") {
    Grid g(48, 2.0);
    const Background bg(2.0, 1.0);
    const Axis e1{0, 1}, e2{1, 1};
    auto T = random_triple(g, 3);
    ExpansionOptions eo;
    eo.backend = Backend::spectral;
    auto E = ss_expansion(make_isotropic(T.lambda, T.mu, T.rho), bg, e1, e2, eo);
    const auto& F = V(E.front_identity);
    const auto& w2 = V(E.coefficient("w2").field);

    DataFunctionalOptions so;
    so.rule = RayRule::upwind;
    so.backend = Backend::spectral;
    auto G = s_sources(T.lambda, T.mu, T.rho, bg, e1, e2, so).G;
    auto half = [&](const ScalarField& x) { return 0.5 * laplacian(ray_antiderivative(x, e1), Backend::fd); };
    for (int i = 0; i < 3; ++i) {
        auto want = G[0][i] - half(G[1][i]) + half(half(G[2][i]));
        CHECK(rel_error(F[i], want) <= 1e-8);
    }
    // w2 is parallel to alpha x theta
    CHECK(w2[0].is_zero());
    CHECK(w2[1].is_zero());
    // the alpha component is the data functional itself
    auto Ds = data_functional_s(T.lambda, T.mu, T.rho, bg, e1, e2);
    CHECK(rel_error(F[1], Ds.vector()[1]) <= 1e-8);
}

TEST_CASE("residuals of a random perturbation") {
    Grid g(64, 2.0);
    auto P = random_perturbation(g, 7);
    const Background bg(2.0, 1.0);
    const std::map<std::string, std::string> top{
        {"pp", "PPidentity4"}, {"sp", "SPidentity4"}, {"ps", "PSidentity1"}, {"ss", "SSidentity4"}};
    for (const auto& E : all_channels(P, bg)) {
        auto rep = residual_report(E);
        CHECK(rep == E.residuals);
        CHECK(rep.size() >= 2);
        for (auto [name, r] : rep) {
            INFO(E.channel.name() << " " << name << " = " << r);
            CHECK(r <= 1e-6);
        }
        CHECK(rep.at(top.at(E.channel.name())) <= 1e-8);
    }
    // other directions
    auto E = pp_expansion(P, bg, {2, -1});
    for (auto [name, r] : E.residuals) CHECK(r <= 1e-6);
    auto F = ss_expansion(P, bg, {1, -1}, {0, 1});
    for (auto [name, r] : F.residuals) CHECK(r <= 1e-6);
}

TEST_CASE("coefficients are linear in the perturbation") {
    Grid g(32, 2.0);
    const Background bg(2.0, 1.0);
    auto P = random_perturbation(g, 1), Q = random_perturbation(g, 2);
    const double a = 0.7, b = -1.3;
    auto ep = all_channels(P, bg), eq = all_channels(Q, bg), ec = all_channels(a * P + b * Q, bg);
    for (std::size_t n = 0; n < ec.size(); ++n)
        for (std::size_t k = 0; k < ec[n].coefficients.size(); ++k) {
            auto cmp = [&](const ScalarField& x, const ScalarField& y, const ScalarField& z) {
                auto lin = a * y + b * z;
                CHECK(th::max_diff(x, lin) <= 1e-10 * std::max(max_abs(lin), 1e-300));
            };
            const auto& f = ec[n].coefficients[k].field;
            if (std::holds_alternative<ScalarField>(f))
                cmp(S(f), S(ep[n].coefficients[k].field), S(eq[n].coefficients[k].field));
            else
                for (int i = 0; i < 3; ++i)
                    cmp(V(f)[i], V(ep[n].coefficients[k].field)[i], V(eq[n].coefficients[k].field)[i]);
        }
}

TEST_CASE("leading coefficients vanish upstream of omega") {
    Grid g(32, 2.0);
    auto P = random_perturbation(g, 5);
    const Background bg(2.0, 1.0);
    for (Axis t : {Axis{0, 1}, Axis{1, -1}}) {
        const Axis a{2, 1};
        auto check_upstream = [&](const ScalarField& f) {
            bool ok = true;
            for (int i = 0; i < g.N; ++i)
                for (int j = 0; j < g.N; ++j)
                    for (int k = 0; k < g.N; ++k) {
                        const std::array<double, 3> x{g.x(i), g.x(j), g.x(k)};
                        if (t.sign * x[t.axis] < -1.0 && f.at(i, j, k) != 0.0) ok = false;
                    }
            return ok;
        };
        CHECK(check_upstream(S(pp_expansion(P, bg, t).coefficients[0].field)));
        CHECK(check_upstream(S(sp_expansion(P, bg, t, a).coefficients[0].field)));
        for (const auto& E : {ps_expansion(P, bg, t), ss_expansion(P, bg, t, a)})
            for (int i = 0; i < 3; ++i) CHECK(check_upstream(V(E.coefficients[0].field)[i]));
    }
}

}
