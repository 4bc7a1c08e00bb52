#pragma once

#include <vector>

#include "semivalue/game.hpp"

// Plain serial implementations kept as oracles for the parallel kernels.
// They follow the textbook marginal-contribution sums directly, with no
// blocking and no sign-table rewriting, so agreement with the production
// paths is a real check rather than a tautology.
namespace semivalue::reference {

// Ascending mask order, evaluated on the game instance itself.
std::vector<double> enumerate_values(Game& g);

// phi_i = 2^{-(n-1)} * sum over S not containing i of [v(S+i) - v(S)].
std::vector<double> exact_banzhaf(Game& g);

// phi_i = (1/n) * sum over S not containing i of
//         C(n-1,|S|)^{-1} [v(S+i) - v(S)].
std::vector<double> exact_shapley(Game& g);

}  // namespace semivalue::reference
