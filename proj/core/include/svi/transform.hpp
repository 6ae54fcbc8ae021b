#pragma once

#include "svi/grid.hpp"

namespace svi {

/// Default bound on |mu| before a path is declared pathological.
inline constexpr double kDefaultMuCap = 30.0;

enum class ReactionKind { Zero, Linear, Saturating };

/// F(t, xi, r): 0, alpha r, or alpha tanh(r). All satisfy F(0) = 0 and are alpha-Lipschitz.
struct ReactionSpec {
    ReactionKind kind = ReactionKind::Zero;
    double alpha = 0.0;

    double operator()(double r) const;
};

/// Throws NumericalFailure if |mu| exceeds cap anywhere.
void check_mu_cap(const Field& mu, double cap = kDefaultMuCap);

/// X = e^mu y.
Field forward(const Field& mu, const Field& y, double cap = kDefaultMuCap);
/// y = e^-mu X.
Field inverse(const Field& mu, const Field& X, double cap = kDefaultMuCap);

/// Linear part of the transformed reaction: mu_tilde - |grad mu|^2 - lap mu.
Field reaction_coefficient(const Field& mu_tilde, const VectorField& grad_mu, const Field& lap_mu);

/// e^-mu F(e^mu y) + (mu_tilde - |grad mu|^2 - lap mu) y.
Field effective_reaction(const ReactionSpec& rs, const Field& mu, const Field& mu_tilde,
                         const VectorField& grad_mu, const Field& lap_mu, double t, const Field& y);

/// e^-mu f.
Field effective_source(const Field& mu, const Field& f);

}  // namespace svi
