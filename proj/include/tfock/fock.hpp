#pragma once

// Truncated Fock layer.  Words over the deformed-frame one-particle basis
// index each level; the first letter is the most significant digit, so the
// level-n space is (first letter) x (level n-1) block structured.  In this
// frame the twist acts on basis words as a scaled flip, every level Gram is
// the kernel P^(n) = sum over S_n of the quasi-multiplicative twist words,
// and the deformed pairing of two levels is <u, P^(n) v>.

#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "tfock/model.hpp"

namespace tfock {

class WordBasis {
public:
    WordBasis() = default;
    explicit WordBasis(const Model& m, int levels = -1);

    int dim() const { return d_; }
    int levels() const { return n_; }  // truncation depth N
    Eigen::Index size(int level) const { return sizes_[level]; }
    int sector(int letter) const { return sector_of_[letter]; }
    double q(int letter_a, int letter_b) const { return q_(sector_of_[letter_a], sector_of_[letter_b]); }

    void word_of(int level, Eigen::Index idx, std::vector<int>& out) const;
    Eigen::Index index_of(const std::vector<int>& word) const;

private:
    int d_ = 0;
    int n_ = 0;
    std::vector<int> sector_of_;
    MatrixXd q_;
    std::vector<Eigen::Index> sizes_;
};

// Coefficient vectors per level, 0..N.
struct FockVector {
    std::vector<VectorXcd> lev;

    static FockVector zero(const WordBasis& b);
    static FockVector vacuum(const WordBasis& b);

    int levels() const { return static_cast<int>(lev.size()) - 1; }
    FockVector& operator+=(const FockVector& o);
    FockVector& operator*=(cplx c);
    double norm_ambient() const;
};

// Scaled flip on two letters: (a, b) -> q(a, b) (b, a).
MatrixXcd twist_matrix(const Model& m);

// T_i = 1^{(i-1)} (x) T acting on slots i, i+1 of level n (i is 1-based).
MatrixXcd extend_twist(const Model& m, int i, int n);

// Bubble-sort inversion sequence: returns 1-based generator indices g so that
// sigma = tau_{g[0]} tau_{g[1]} ... (left-to-right product), reduced.
std::vector<int> reduced_word(std::vector<int> perm);

// Quasi-multiplicative evaluation along the canonical reduced word of the
// 0-based one-line permutation.  Dense matrix on level n = perm.size().
MatrixXcd pi_sigma(const Model& m, const std::vector<int>& perm);

// Independent oracle: sum pi(sigma) over all of S_n by direct enumeration.
MatrixXcd p_matrix_bruteforce(const Model& m, int n);

class TwistKernel {
public:
    TwistKernel() = default;
    TwistKernel(const Model& m, int top_level, bool verify);

    const WordBasis& basis() const { return basis_; }
    int levels() const { return basis_.levels(); }
    const MatrixXcd& p(int level) const { return p_[level]; }
    // X -> P^(level)^{-1} X via the cached Cholesky factor.
    MatrixXcd solve_p(int level, const MatrixXcd& x) const { return llt_[level].solve(x); }
    VectorXcd solve_p(int level, const VectorXcd& x) const { return llt_[level].solve(x); }
    // Lower Cholesky factor L with P = L L^*.
    MatrixXcd l_factor(int level) const { return llt_[level].matrixL(); }

    double verify_residual() const { return verify_residual_; }

    cplx inner_T(int level, const VectorXcd& u, const VectorXcd& v) const;
    cplx inner_T(const FockVector& u, const FockVector& v) const;
    double norm_T(const FockVector& u) const;

    // Operator norm of a block mapping level src -> level dst, measured in
    // the deformed level geometries.
    double block_norm_T(const MatrixXcd& x, int src, int dst) const;

private:
    WordBasis basis_;
    std::vector<MatrixXcd> p_;
    std::vector<Eigen::LLT<MatrixXcd>> llt_;
    double verify_residual_ = 0.0;
};

// Builds P^(0..top) by the ladder recursion P^(n) = (1 (x) P^(n-1)) R_n with
// R_n = 1 + T_1 + T_1 T_2 + ... ;  verify=true cross-checks against the
// brute-force S_n sum for n <= min(top, 5).
TwistKernel build_kernel(const Model& m, int top_level = -1, bool verify = true);

struct PositivityReport {
    std::vector<double> min_eig;  // per level 0..N
    double floor = 0.0;
    bool positive = false;
};

// Minimum eigenvalue of P^(n) per level; degenerate levels are reported, not
// thrown.  Levels are examined concurrently.
PositivityReport check_positivity(const Model& m, const TwistKernel& k, double floor = 1e-10);

// Operator-norm residual of the braid identity for the extended twists on
// level 3: (1 (x) T)(T (x) 1)(1 (x) T) - (T (x) 1)(1 (x) T)(T (x) 1).
double check_yang_baxter(const Model& m);

}  // namespace tfock
