#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "coopmds/field.hpp"

namespace coopmds {

/// Solves sum_j points[j]^t * y[j] = rhs[t] for t = 0..q-1. Points must be
/// pairwise distinct.
std::vector<FieldElement> solve_vandermonde(const Field& field, std::span<const FieldElement> points,
                                            std::span<const FieldElement> rhs);

/// Completes a codeword of {y : sum_j points[j]^t y[j] = 0, t = 0..parity-1}
/// from exactly points.size() - parity known coordinates. Consistency of the
/// known symbols is the caller's responsibility.
std::vector<FieldElement> grs_erasure_recover(const Field& field, std::span<const FieldElement> points,
                                              std::size_t parity, const std::map<std::size_t, FieldElement>& known);

/// In-place variant used by the codec and repair loops: `word` holds the known
/// coordinates, and the entries listed in `unknown` (exactly `parity` of them)
/// are overwritten. Point distinctness is not rechecked here.
void grs_fill_unknowns(const Field& field, std::span<const FieldElement> points, std::span<FieldElement> word,
                       std::span<const std::size_t> unknown);

}  // namespace coopmds
