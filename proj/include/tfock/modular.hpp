#pragma once

// Numerical reconstruction of the vacuum-state modular data on the truncated
// twisted Fock space.  The conjugation S is read off column by column from
// Wick-word adjoints (S(xOmega) = x*Omega); Delta and J come from its polar
// decomposition with every adjoint taken against the level kernels P^(n).
// Antilinear maps are stored as (linear matrix) composed with coordinate
// conjugation, i.e. S(v) = s_lin * conj(v) in word coordinates.
//
// Identities involving the modular data are only meaningful a guard band
// below the truncation level; g_mod = 2 by default (the S construction
// consumes one level of creation degree, conjugated fields one more).

#include <vector>

#include "tfock/operators.hpp"

namespace tfock {

struct ModularData {
    int top = 0;     // highest level carrying S / Delta / J
    int g_mod = 2;   // guard band used to derive `top` from the truncation

    std::vector<MatrixXcd> s_lin;    // per level: S = s_lin . conj
    std::vector<MatrixXcd> delta;    // per level: positive linear map
    std::vector<MatrixXcd> j_lin;    // per level: J = j_lin . conj
    std::vector<VectorXd> delta_eigs;   // Delta spectrum per level
    std::vector<MatrixXcd> delta_vecs;  // V with V^dagger P V = I, Delta = V diag V^dagger P
    std::vector<MatrixXcd> delta_gram_; // cached P^(n), closes the eigen decomposition

    // Diagnostics, maxima over levels <= top (relative where sensible).
    double off_level_mass = 0.0;        // mass of x*Omega off its own level
    double polar_residual = 0.0;        // ||S - J Delta^{1/2}||
    double s_square_residual = 0.0;     // ||S^2 - 1||
    double j_square_residual = 0.0;     // ||J^2 - 1||
    double reversal_residual = 0.0;     // S vs letterwise-conjugated word reversal (measured, not asserted)
    double tensor_candidate_residual = 0.0;  // Delta vs (A^{-1})^{(x)n} (measured, not asserted)

    MatrixXcd delta_power(int level, double p) const;
    MatrixXcd delta_unitary(int level, double t) const;  // Delta^{it}
    VectorXcd apply_S(int level, const VectorXcd& v) const;
    VectorXcd apply_J(int level, const VectorXcd& v) const;
};

// Builds S on levels <= model.level() - g_mod from the Wick table, then the
// polar pieces.  Throws if an S frame is rank deficient or a Delta block
// fails positivity (both flag a too-small truncation).
ModularData build_modular(const Model& m, const WordBasis& b, const TwistKernel& k,
                          const WickTable& table, int g_mod = 2);

// J x J blockwise, defined on source levels <= top - 1 (destinations need
// J too); blocks outside that range are dropped.
FockOperator conjugate_by_modular_J(const WordBasis& b, const ModularData& md,
                                    const FockOperator& x);

// Relative operator residual of J s(xi) J - d(A^{-1/2} xi) on source levels
// <= top - 1; xi is a coordinate-frame vector in H_R.
double check_commutant_relation(const Model& m, const WordBasis& b, const TwistKernel& k,
                                const ModularData& md, const VectorXcd& xi_coord);

// Relative operator residual of Delta^{it} s(xi) Delta^{-it} - s(U_{-t} xi)
// on source levels <= top - 1.
double modular_flow_residual(const Model& m, const WordBasis& b, const TwistKernel& k,
                             const ModularData& md, double t, const VectorXcd& xi_coord);

// phi-preserving conditional expectation onto the subalgebra generated by a
// union of sectors D.  F_T(D) is the span of words with all letters in D;
// E(x) is the Wick quantization of the deformed-orthogonal projection of
// xOmega onto it.
struct ExpectationData {
    std::vector<int> sectors;  // sorted sector subset D
    int top = 0;               // highest level with a projection
    std::vector<std::vector<Eigen::Index>> word_sel;  // per level: indices of all-D words
    std::vector<MatrixXcd> proj;       // per level: projection onto F_T(D)
    std::vector<MatrixXcd> perp;       // per level: word basis of F_T(D)^perp
    double invariance_residual = 0.0;  // ||(1 - P_D) U_t P_D|| over the t grid
    double perp_angle_max = 0.0;       // angle of `perp` vs the direct complement

    const WickTable* table = nullptr;  // quantization cache (borrowed)
};

ExpectationData build_expectation(const Model& m, const WordBasis& b, const TwistKernel& k,
                                  const WickTable& table, const std::vector<int>& sectors);

FockOperator conditional_expectation(const WordBasis& b, const ExpectationData& ed,
                                     const FockOperator& x);

}  // namespace tfock
