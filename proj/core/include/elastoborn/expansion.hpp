#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "elastoborn/calculus.hpp"
#include "elastoborn/tensor.hpp"

namespace elastoborn {

enum class Mode { P, S };

struct Channel {
    Mode incident = Mode::P;
    Mode observed = Mode::P;
    Axis theta;
    std::optional<Axis> alpha;  // polarization, S incidence only

    std::string name() const;  // "pp", "sp", "ps", "ss"
};

void validate(const Channel& ch);
Channel parse_channel(const std::string& name, const Axis& theta, std::optional<Axis> alpha = std::nullopt);

using AnyField = std::variant<ScalarField, VectorField>;

struct Coefficient {
    std::string singularity;  // "delta'", "delta", "H0", "H1", "H2"
    std::string name;         // w2, w1, w0, wm1, wm2 as numbered in the channel's ansatz
    AnyField field;
};

struct ExpansionResult {
    Channel channel;
    std::vector<Coefficient> coefficients;  // highest singularity first
    std::map<std::string, double> residuals;
    AnyField front_identity;

    const Coefficient& coefficient(const std::string& name) const;
};

struct ExpansionOptions {
    // Rule for the first ray integration (compact source). Later integrations
    // act on plateau fields and always use the upwind march.
    RayRule rule = RayRule::upwind;
    Backend backend = Backend::fd;
};

ExpansionResult pp_expansion(const Perturbation& P, const Background& bg, const Axis& theta,
                             const ExpansionOptions& opt = {});
ExpansionResult sp_expansion(const Perturbation& P, const Background& bg, const Axis& theta, const Axis& alpha,
                             const ExpansionOptions& opt = {});
ExpansionResult ps_expansion(const Perturbation& P, const Background& bg, const Axis& theta,
                             const ExpansionOptions& opt = {});
ExpansionResult ss_expansion(const Perturbation& P, const Background& bg, const Axis& theta, const Axis& alpha,
                             const ExpansionOptions& opt = {});
ExpansionResult expand(const Perturbation& P, const Background& bg, const Channel& ch, const ExpansionOptions& opt = {});

std::map<std::string, double> residual_report(const ExpansionResult& E);

// ||lhs - rhs|| / (sum of the term norms) on omega; 0 when every term vanishes.
double relative_residual(const std::vector<ScalarField>& lhs_terms, const std::vector<ScalarField>& rhs_terms);
double relative_residual(const std::vector<VectorField>& lhs_terms, const std::vector<VectorField>& rhs_terms);

}  // namespace elastoborn
