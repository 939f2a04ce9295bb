#pragma once

#include <cstddef>
#include <span>

#include "tailor/errors.hpp"
#include "tailor/rng.hpp"

namespace tailor {

// Probability-proportional (roulette wheel) selection. Option k wins with
// probability weights[k] / sum(weights). The draw is a continuous uniform
// over (0, sum]; option k owns the cumulative interval
// (cum[k-1], cum[k]], so a zero-weight option owns an empty interval and
// is never picked while the total is positive. A continuous draw keeps
// fractional weights exactly proportional, and scaling every weight by
// c > 0 scales the draw and the intervals alike, leaving the choice
// sequence unchanged under a shared seed.
//
// An all-zero weight vector folds to a uniform pick instead of an error:
// it arises legitimately and must not halt a nightly run.
std::size_t roulette_index(std::span<const double> weights, Rng& rng);

template <typename T>
const T& roulette_select(std::span<const T> options, std::span<const double> weights, Rng& rng) {
    if (options.size() != weights.size()) {
        throw DomainError("roulette_select: options and weights differ in length");
    }
    return options[roulette_index(weights, rng)];
}

}  // namespace tailor
