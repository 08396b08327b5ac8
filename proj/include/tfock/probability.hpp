#pragma once

// Vacuum-state moments of the field operators, an independent pair-partition
// oracle for sector-basis letters, and finite-scale centralizer probes.
// The vacuum state is phi(x) = <Omega, x Omega>_T.

#include <vector>

#include "tfock/operators.hpp"

namespace tfock {

// A moment query holds coordinate-frame one-particle letters; basis_index[i]
// is the coordinate index when letter i is a coordinate basis vector (the
// oracle path requires this), -1 otherwise.
struct MomentQuery {
    std::vector<VectorXcd> letters;
    std::vector<int> basis_index;

    int order() const { return static_cast<int>(letters.size()); }
};

MomentQuery basis_query(const Model& m, const std::vector<int>& coords);

// phi(x) for an operator given as graded blocks.
cplx vacuum_state(const WordBasis& b, const FockOperator& x);

// <Omega, s(xi_1)...s(xi_k) Omega>_T with s(xi) = l(xi) + l*(xi), evaluated
// by splitting the product in the middle so intermediate vectors stay inside
// the truncation for k <= 2(levels - 1).
cplx vacuum_moment(const Model& m, const WordBasis& b, const TwistKernel& k, const MomentQuery& query);

// Combinatorial oracle: sum over pair partitions, each pair (a < b)
// contributing <xi_a, xi_b>_U, each crossing of two pairs contributing the q
// of the crossed sectors.  Restricted to coordinate-basis letters; the
// convention is validated against vacuum_moment, not assumed.
cplx pair_partition_moment(const Model& m, const MomentQuery& query);

// max over samples y of |phi(x y) - phi(y x)|.
double centralizer_residual(const WordBasis& b, const FockOperator& x,
                            const std::vector<FockOperator>& samples);

// |phi(exp(i t s(xi)))| along a t grid, computed from the eigendecomposition
// of the <.,.>_T-symmetrized field matrix on the full truncated space.
// xi must be a flow-fixed real vector.
std::vector<double> oscillation_probe(const Model& m, const WordBasis& b, const TwistKernel& k,
                                      const VectorXcd& xi_coord, const std::vector<double>& t_grid);

}  // namespace tfock
