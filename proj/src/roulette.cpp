#include "tailor/roulette.hpp"

namespace tailor {

std::size_t roulette_index(std::span<const double> weights, Rng& rng) {
    if (weights.empty()) throw DomainError("roulette_index: no options to select from");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw DomainError("roulette_index: negative weight");
        total += w;
    }
    if (total <= 0.0) {
        return static_cast<std::size_t>(uniform_below(rng, weights.size()));
    }
    // (1 - u) maps [0,1) onto (0,1], so the draw lands in (0, total].
    const double r = total * (1.0 - uniform_double(rng));
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        cum += weights[k];
        if (r <= cum) return k;
    }
    return weights.size() - 1;
}

}  // namespace tailor
