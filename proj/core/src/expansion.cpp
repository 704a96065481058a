#include "elastoborn/expansion.hpp"

#include <cmath>
#include <sstream>

#include "elastoborn/error.hpp"

namespace elastoborn {

std::string Channel::name() const {
    std::string s;
    s += incident == Mode::P ? 'p' : 's';
    s += observed == Mode::P ? 'p' : 's';
    return s;
}

void validate(const Channel& ch) {
    if (ch.theta.axis < 0 || ch.theta.axis > 2 || std::abs(ch.theta.sign) != 1)
        throw Error("channel: theta must be a signed coordinate axis");
    if (ch.incident == Mode::S) {
        if (!ch.alpha) throw Error("channel " + ch.name() + ": S incidence needs a polarization alpha");
        if (ch.alpha->axis == ch.theta.axis) throw Error("channel " + ch.name() + ": alpha must be orthogonal to theta");
    }
}

Channel parse_channel(const std::string& name, const Axis& theta, std::optional<Axis> alpha) {
    if (name.size() != 2 || (name[0] != 'p' && name[0] != 's') || (name[1] != 'p' && name[1] != 's'))
        throw Error("unknown channel '" + name + "' (expected pp, sp, ps or ss)");
    Channel ch;
    ch.incident = name[0] == 'p' ? Mode::P : Mode::S;
    ch.observed = name[1] == 'p' ? Mode::P : Mode::S;
    ch.theta = theta;
    if (ch.incident == Mode::S) ch.alpha = alpha;
    validate(ch);
    return ch;
}

const Coefficient& ExpansionResult::coefficient(const std::string& name) const {
    for (const auto& c : coefficients)
        if (c.name == name || c.singularity == name) return c;
    throw Error("expansion " + channel.name() + ": no coefficient '" + name + "'");
}

namespace {

double sum_norms(const std::vector<ScalarField>& t) {
    double s = 0.0;
    for (const auto& f : t) s += norm(f);
    return s;
}
double sum_norms(const std::vector<VectorField>& t) {
    double s = 0.0;
    for (const auto& f : t) s += norm(f);
    return s;
}

template <class F>
F difference(const std::vector<F>& lhs, const std::vector<F>& rhs, const Grid& g) {
    F d(g);
    for (const auto& f : lhs) d += f;
    for (const auto& f : rhs) d -= f;
    return d;
}

template <class F>
double rel_res(const std::vector<F>& lhs, const std::vector<F>& rhs) {
    const F& first = lhs.empty() ? rhs.front() : lhs.front();
    const Grid g = [&] {
        if constexpr (std::is_same_v<F, ScalarField>) return first.grid;
        else return first.grid();
    }();
    double scale = sum_norms(lhs) + sum_norms(rhs);
    if (scale == 0.0) return 0.0;
    return norm(difference(lhs, rhs, g)) / scale;
}

void check_speeds(const Background& bg) {
    if (std::abs(bg.cp() - bg.cs()) < 1e-9) throw Error("degenerate speeds: c_p == c_s");
}

// theta . grad of a compact field
ScalarField dtheta(const ScalarField& f, const Axis& th, Backend b) {
    MultiIndex beta{0, 0, 0};
    beta[th.axis] = 1;
    ScalarField d = diff(f, beta, b);
    if (th.sign < 0) d *= -1.0;
    return d;
}
VectorField dtheta(const VectorField& f, const Axis& th, Backend b) {
    VectorField out;
    for (int a = 0; a < 3; ++a) out[a] = dtheta(f[a], th, b);
    return out;
}

VectorField ray_derivative(const VectorField& f, const Axis& th, RayRule r) {
    VectorField out;
    for (int a = 0; a < 3; ++a) out[a] = elastoborn::ray_derivative(f[a], th, r);
    return out;
}
VectorField ray_antiderivative(const VectorField& f, const Axis& th, RayRule r) {
    VectorField out;
    for (int a = 0; a < 3; ++a) out[a] = elastoborn::ray_antiderivative(f[a], th, r);
    return out;
}
VectorField lap(const VectorField& f, Backend b) {
    VectorField out;
    for (int a = 0; a < 3; ++a) out[a] = laplacian(f[a], b);
    return out;
}

// Inputs after the first ray integration are not compact along the ray.
constexpr RayRule kLater = RayRule::upwind;

void require_grid(const Perturbation& P) {
    if (P.C.grid() != P.rho.grid) throw Error("perturbation: tensor and density grids differ");
}

}  // namespace

double relative_residual(const std::vector<ScalarField>& lhs, const std::vector<ScalarField>& rhs) {
    return rel_res(lhs, rhs);
}
double relative_residual(const std::vector<VectorField>& lhs, const std::vector<VectorField>& rhs) {
    return rel_res(lhs, rhs);
}

ExpansionResult pp_expansion(const Perturbation& P, const Background& bg, const Axis& th, const ExpansionOptions& opt) {
    require_grid(P);
    const double cp2 = bg.cp2();
    const Backend b = opt.backend;
    const auto T = Slot::vec(th);
    const auto D = Slot::div();

    ScalarField r4 = cp2 * P.rho - contract(P.C, {T, T, T, T}, b);
    ScalarField r3 = 2.0 * contract(P.C, {D, T, T, T}, b) - cp2 * dtheta(P.rho, th, b);
    ScalarField r2 = -contract(P.C, {D, D, T, T}, b);

    ScalarField w2 = (1.0 / (2 * cp2)) * ray_antiderivative(r4, th, opt.rule);
    ScalarField lw2 = cp2 * laplacian(w2, Backend::fd);
    ScalarField w1 = (1.0 / (2 * cp2)) * ray_antiderivative(lw2 + r3, th, kLater);
    ScalarField lw1 = cp2 * laplacian(w1, Backend::fd);
    ScalarField w0 = (1.0 / (2 * cp2)) * ray_antiderivative(lw1 + r2, th, kLater);
    ScalarField lw0 = laplacian(w0, Backend::fd);
    ScalarField wm1 = 0.5 * ray_antiderivative(lw0, th, kLater);

    ExpansionResult E;
    E.channel = parse_channel("pp", th);
    E.residuals["PPidentity4"] = relative_residual({2 * cp2 * ray_derivative(w2, th, opt.rule)}, {r4});
    E.residuals["PPidentity3"] = relative_residual({2 * cp2 * ray_derivative(w1, th, kLater), -1.0 * lw2}, {r3});
    E.residuals["PPidentity2"] = relative_residual({2 * cp2 * ray_derivative(w0, th, kLater), -1.0 * lw1}, {r2});
    E.residuals["PPtransport_H1"] =
        relative_residual({2 * cp2 * ray_derivative(wm1, th, kLater)}, {cp2 * lw0});
    E.front_identity = w0;
    E.coefficients = {{"delta'", "w2", std::move(w2)},
                      {"delta", "w1", std::move(w1)},
                      {"H0", "w0", std::move(w0)},
                      {"H1", "wm1", std::move(wm1)}};
    return E;
}

ExpansionResult sp_expansion(const Perturbation& P, const Background& bg, const Axis& th, const Axis& al,
                             const ExpansionOptions& opt) {
    require_grid(P);
    check_speeds(bg);
    ExpansionResult E;
    E.channel = parse_channel("sp", th, al);
    const double cp2 = bg.cp2(), cs2 = bg.cs2(), d = cs2 - cp2;
    const Backend b = opt.backend;
    const auto T = Slot::vec(th), A = Slot::vec(al), D = Slot::div();

    ScalarField r4 = -contract(P.C, {T, T, T, A}, b);
    ScalarField r3 = 2.0 * contract(P.C, {D, T, T, A}, b) - cs2 * dtheta(P.rho, al, b);
    ScalarField r2 = -contract(P.C, {D, D, T, A}, b);

    ScalarField w1 = (1.0 / d) * r4;
    ScalarField t1 = 2 * cp2 * dtheta(w1, th, b);
    ScalarField w0 = (1.0 / d) * (r3 - t1);
    ScalarField t0 = 2 * cp2 * dtheta(w0, th, b);
    ScalarField l1 = cp2 * laplacian(w1, b);
    ScalarField wm1 = (1.0 / d) * (r2 - t0 + l1);
    ScalarField tm1 = 2 * cp2 * dtheta(wm1, th, b);
    ScalarField l0 = cp2 * laplacian(w0, b);
    ScalarField wm2 = (1.0 / d) * (l0 - tm1);

    E.residuals["SPidentity4"] = relative_residual({d * w1}, {r4});
    E.residuals["SPidentity3"] = relative_residual({d * w0, t1}, {r3});
    E.residuals["SPidentity2"] = relative_residual({d * wm1, t0, -1.0 * l1}, {r2});
    E.residuals["SPtransport_H0"] = relative_residual({d * wm2, tm1, -1.0 * l0}, {});
    E.front_identity = w0;
    E.coefficients = {{"delta", "w1", std::move(w1)},
                      {"H0", "w0", std::move(w0)},
                      {"H1", "wm1", std::move(wm1)},
                      {"H2", "wm2", std::move(wm2)}};
    return E;
}

ExpansionResult ps_expansion(const Perturbation& P, const Background& bg, const Axis& th, const ExpansionOptions& opt) {
    require_grid(P);
    check_speeds(bg);
    ExpansionResult E;
    E.channel = parse_channel("ps", th);
    const double cp2 = bg.cp2(), cs2 = bg.cs2(), d = cp2 - cs2;
    const Backend b = opt.backend;
    const auto T = Slot::vec(th), D = Slot::div();

    VectorField V = contract_vec(P.C, {T, T, T}, b);  // c_pjkl th_j th_k th_l
    VectorField U = contract_vec(P.C, {D, T, T}, b);  // d_j c_pjkl th_k th_l
    // e_ipq d_q V_p = -curl(V)_i, e_ipq V_p th_q = (V x th)_i, e_ipq th_p d_q rho = -curl(rho th)_i
    VectorField r1 = -1.0 * cross(V, th);
    VectorField r2 = -1.0 * curl(V, b) + cross(U, th) + cp2 * curl(along(P.rho, th), b);
    VectorField r3 = curl(U, b);

    VectorField w1 = (1.0 / d) * r1;
    VectorField t1 = 2 * cs2 * dtheta(w1, th, b);
    VectorField w0 = (1.0 / d) * (r2 - t1);
    VectorField t0 = 2 * cs2 * dtheta(w0, th, b);
    VectorField l1 = cs2 * lap(w1, b);
    VectorField wm1 = (1.0 / d) * (l1 - t0 + r3);
    VectorField tm1 = 2 * cs2 * dtheta(wm1, th, b);
    VectorField l0 = cs2 * lap(w0, b);
    VectorField wm2 = (1.0 / d) * (l0 - tm1);

    E.residuals["PSidentity1"] = relative_residual({d * w1}, {r1});
    E.residuals["PSidentity2"] = relative_residual({d * w0, t1}, {r2});
    E.residuals["PSidentity3"] = relative_residual({d * wm1, t0, -1.0 * l1}, {r3});
    E.residuals["PSidentity4"] = relative_residual({d * wm2, tm1, -1.0 * l0}, {});
    E.front_identity = w0;
    E.coefficients = {{"delta", "w1", std::move(w1)},
                      {"H0", "w0", std::move(w0)},
                      {"H1", "wm1", std::move(wm1)},
                      {"H2", "wm2", std::move(wm2)}};
    return E;
}

ExpansionResult ss_expansion(const Perturbation& P, const Background& bg, const Axis& th, const Axis& al,
                             const ExpansionOptions& opt) {
    require_grid(P);
    ExpansionResult E;
    E.channel = parse_channel("ss", th, al);
    const double cs2 = bg.cs2();
    const Backend b = opt.backend;
    const auto T = Slot::vec(th), A = Slot::vec(al), D = Slot::div();

    VectorField V = contract_vec(P.C, {T, T, A}, b);  // c_pjkl th_j th_k al_l
    VectorField U = contract_vec(P.C, {D, T, A}, b);  // d_j c_pjkl th_k al_l
    // e_ipq rho al_p th_q = rho (al x th)_i, e_ipq al_p d_q rho = -curl(rho al)_i
    VectorField r4 = -1.0 * cross(V, th) + cs2 * cross(along(P.rho, al), th);
    VectorField r3 = -1.0 * curl(V, b) + cross(U, th) + cs2 * curl(along(P.rho, al), b);

    VectorField w2 = (1.0 / (2 * cs2)) * ray_antiderivative(r4, th, opt.rule);
    VectorField l2 = cs2 * lap(w2, Backend::fd);
    VectorField w1 = (1.0 / (2 * cs2)) * ray_antiderivative(l2 + r3, th, kLater);
    VectorField l1 = cs2 * lap(w1, Backend::fd);

    E.residuals["SSidentity4"] = relative_residual({2 * cs2 * ray_derivative(w2, th, opt.rule)}, {r4});
    E.residuals["SSidentity3"] = relative_residual({2 * cs2 * ray_derivative(w1, th, kLater), -1.0 * l2}, {r3});
    // c_s^2 lap w1 - e_ipq d_q d_j c_pjkl th_k al_l with e_ipq d_q U_p = -curl(U)_i
    E.front_identity = l1 + curl(U, b);
    E.coefficients = {{"delta'", "w2", std::move(w2)}, {"delta", "w1", std::move(w1)}};
    return E;
}

ExpansionResult expand(const Perturbation& P, const Background& bg, const Channel& ch, const ExpansionOptions& opt) {
    validate(ch);
    const std::string n = ch.name();
    if (n == "pp") return pp_expansion(P, bg, ch.theta, opt);
    if (n == "ps") return ps_expansion(P, bg, ch.theta, opt);
    if (n == "sp") return sp_expansion(P, bg, ch.theta, *ch.alpha, opt);
    return ss_expansion(P, bg, ch.theta, *ch.alpha, opt);
}

std::map<std::string, double> residual_report(const ExpansionResult& E) { return E.residuals; }

}  // namespace elastoborn
