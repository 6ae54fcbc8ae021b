#include "svi/transform.hpp"

#include <cmath>
#include <string>

#include "svi/errors.hpp"

namespace svi {

namespace {

void require_same(const Field& a, const Field& b, const char* what) {
    if (a.size() != b.size()) {
        throw SizeMismatch(std::string(what) + ": sizes " + std::to_string(a.size()) + " and " +
                           std::to_string(b.size()) + " differ");
    }
}

}  // namespace

double ReactionSpec::operator()(double r) const {
    switch (kind) {
        case ReactionKind::Zero: return 0.0;
        case ReactionKind::Linear: return alpha * r;
        case ReactionKind::Saturating: return alpha * std::tanh(r);
    }
    return 0.0;
}

void check_mu_cap(const Field& mu, double cap) {
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (!(std::abs(mu[i]) <= cap)) {
            throw NumericalFailure("transform: |mu| = " + std::to_string(std::abs(mu[i])) + " at node " +
                                   std::to_string(i) + " exceeds cap " + std::to_string(cap));
        }
    }
}

Field forward(const Field& mu, const Field& y, double cap) {
    require_same(mu, y, "forward");
    check_mu_cap(mu, cap);
    Field x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::exp(mu[i]) * y[i];
    return x;
}

Field inverse(const Field& mu, const Field& X, double cap) {
    require_same(mu, X, "inverse");
    check_mu_cap(mu, cap);
    Field y(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) y[i] = std::exp(-mu[i]) * X[i];
    return y;
}

Field reaction_coefficient(const Field& mu_tilde, const VectorField& grad_mu, const Field& lap_mu) {
    require_same(mu_tilde, lap_mu, "reaction_coefficient");
    Field c(mu_tilde.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        double g2 = 0.0;
        for (const Field& comp : grad_mu.components) g2 += comp[i] * comp[i];
        c[i] = mu_tilde[i] - g2 - lap_mu[i];
    }
    return c;
}

Field effective_reaction(const ReactionSpec& rs, const Field& mu, const Field& mu_tilde,
                         const VectorField& grad_mu, const Field& lap_mu, double /*t*/, const Field& y) {
    require_same(mu, y, "effective_reaction");
    require_same(mu_tilde, y, "effective_reaction");
    for (const Field& comp : grad_mu.components) require_same(comp, y, "effective_reaction");
    const Field c = reaction_coefficient(mu_tilde, grad_mu, lap_mu);
    Field out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        double nonlinear = 0.0;
        switch (rs.kind) {
            case ReactionKind::Zero: break;
            case ReactionKind::Linear: nonlinear = rs.alpha * y[i]; break;
            case ReactionKind::Saturating: {
                const double e = std::exp(mu[i]);
                nonlinear = rs(e * y[i]) / e;
                break;
            }
        }
        out[i] = nonlinear + c[i] * y[i];
    }
    return out;
}

Field effective_source(const Field& mu, const Field& f) {
    require_same(mu, f, "effective_source");
    Field out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::exp(-mu[i]) * f[i];
    return out;
}

}  // namespace svi
