#pragma once

// Operators on the truncated twisted Fock space, stored as dense blocks per
// (source level, destination level) pair.  Generator conventions:
//   * left creation prepends, right creation appends;
//   * left annihilation removes the k-th letter against the deformed pairing
//     with a q factor per letter standing LEFT of slot k, right annihilation
//     mirrors this with the letters standing RIGHT of the slot;
//   * adjoints are always taken against the level kernels P^(n).
// Generator-level functions take one-particle vectors in the deformed frame;
// the field/Wick entry points take coordinate-frame vectors and validate
// membership in H_R (left side) or H_R' (right side).

#include <map>
#include <utility>
#include <vector>

#include "tfock/fock.hpp"

namespace tfock {

class FockOperator {
public:
    FockOperator() = default;
    explicit FockOperator(const WordBasis& b);

    int levels() const { return static_cast<int>(sizes_.size()) - 1; }
    Eigen::Index level_size(int n) const { return sizes_[n]; }

    bool has_block(int src, int dst) const { return blocks_.count({src, dst}) > 0; }
    const MatrixXcd& block(int src, int dst) const;
    MatrixXcd& mutable_block(int src, int dst);  // zero-initialized on first touch
    const std::map<std::pair<int, int>, MatrixXcd>& blocks() const { return blocks_; }

    // Largest |dst - src| carried by a nonzero block (creation degree).
    int guard_degree() const;

    FockVector apply(const FockVector& v) const;
    FockOperator compose(const FockOperator& rhs) const;  // this after rhs

    FockOperator& operator+=(const FockOperator& o);
    FockOperator& operator-=(const FockOperator& o);
    FockOperator& operator*=(cplx c);

private:
    std::vector<Eigen::Index> sizes_;
    std::map<std::pair<int, int>, MatrixXcd> blocks_;
};

FockOperator operator*(const FockOperator& a, const FockOperator& b);
FockOperator operator+(FockOperator a, const FockOperator& b);
FockOperator operator-(FockOperator a, const FockOperator& b);
FockOperator operator*(cplx c, FockOperator a);

FockOperator identity_op(const WordBasis& b);

// Generators (deformed-frame one-particle argument).
FockOperator left_create(const WordBasis& b, const VectorXcd& xi);
FockOperator left_annihilate(const WordBasis& b, const VectorXcd& xi);
FockOperator right_create(const WordBasis& b, const VectorXcd& xi);
FockOperator right_annihilate(const WordBasis& b, const VectorXcd& xi);

// Matching matrix-free applications.
FockVector apply_left_create(const WordBasis& b, const VectorXcd& xi, const FockVector& v);
FockVector apply_left_annihilate(const WordBasis& b, const VectorXcd& xi, const FockVector& v);
FockVector apply_right_create(const WordBasis& b, const VectorXcd& xi, const FockVector& v);
FockVector apply_right_annihilate(const WordBasis& b, const VectorXcd& xi, const FockVector& v);

// Self-adjoint field operators; xi is a coordinate-frame vector in H_R
// (left side) respectively H_R' (right side).
FockOperator field_s(const Model& m, const WordBasis& b, const VectorXcd& xi_coord);
FockOperator field_d(const Model& m, const WordBasis& b, const VectorXcd& xi_coord);

// Product of q(t_i, t_j) over crossing pairs of the splitting (I, J) of
// {1..n}: i > j for the left-sided expansion, i < j for the right-sided one.
double crossing_coefficient(const Model& m, const std::vector<int>& labels,
                            const std::vector<int>& I, const std::vector<int>& J,
                            bool right_side = false);

// A letter is a one-particle vector supported in a single sector (deformed
// frame); a word is a finite tensor product of letters.
struct WickLetter {
    int sector = 0;
    VectorXcd vec;
};

struct WickWord {
    std::vector<WickLetter> letters;

    int length() const { return static_cast<int>(letters.size()); }
    static WickWord from_basis(const WordBasis& b, const std::vector<int>& letter_indices);
};

// Wick quantization: the operator sum over all splittings (I, J) of the word
// positions into creation and annihilation parts, weighted by the crossing
// coefficient.  wick_s(m, b, w) is the unique algebra element with vacuum
// vector equal to the word; wick_d is its right-sided counterpart.
FockOperator wick_s(const Model& m, const WordBasis& b, const WickWord& w);
FockOperator wick_d(const Model& m, const WordBasis& b, const WickWord& w);

FockVector apply_wick_s(const Model& m, const WordBasis& b, const WickWord& w, const FockVector& v);
FockVector apply_wick_d(const Model& m, const WordBasis& b, const WickWord& w, const FockVector& v);

// Cached left Wick quantizations of every basis word up to a top level,
// with a per-letter generator cache shared across words.  quantize() turns a
// Fock vector with support on levels <= top() into the algebra element whose
// vacuum vector it is.
class WickTable {
public:
    WickTable() = default;
    WickTable(const Model& m, const WordBasis& b, int top_level);

    int top() const { return static_cast<int>(ops_.size()) - 1; }
    const FockOperator& op(int level, Eigen::Index idx) const { return ops_[level][idx]; }
    FockOperator quantize(const FockVector& v) const;

private:
    std::vector<std::vector<FockOperator>> ops_;
};

// Blockwise adjoint against the level kernels:
// block (b -> a) of the adjoint = P^(a)^{-1} (block a -> b)^dagger P^(b).
FockOperator adjoint_T(const TwistKernel& k, const FockOperator& x);

// Operator norm in the deformed geometry, restricted to source levels
// <= max_src (all levels when max_src < 0).
double op_norm_T(const TwistKernel& k, const FockOperator& x, int max_src = -1);

}  // namespace tfock
