#include "tfock/fock.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <stdexcept>

namespace tfock {

namespace {

// In-place scaled flip of slots i-1, i (i is 1-based); returns the q factor.
inline double apply_generator(const WordBasis& b, int i, std::vector<int>& w) {
    const double f = b.q(w[i - 1], w[i]);
    std::swap(w[i - 1], w[i]);
    return f;
}

// Applies a left-to-right generator product to a word (rightmost acts first).
inline double apply_product(const WordBasis& b, const std::vector<int>& gens, std::vector<int>& w) {
    double f = 1.0;
    for (auto it = gens.rbegin(); it != gens.rend(); ++it) f *= apply_generator(b, *it, w);
    return f;
}

void require_permutation(const std::vector<int>& perm) {
    std::vector<bool> seen(perm.size(), false);
    for (int v : perm) {
        if (v < 0 || v >= static_cast<int>(perm.size()) || seen[v])
            throw std::invalid_argument("pi_sigma: not a permutation of 0..n-1");
        seen[v] = true;
    }
}

}  // namespace

WordBasis::WordBasis(const Model& m, int levels) : d_(m.dim()), n_(levels < 0 ? m.level() : levels), q_(m.spec().q) {
    sector_of_.resize(d_);
    for (int k = 0; k < d_; ++k) sector_of_[k] = m.sector_of(k);
    sizes_.resize(n_ + 1);
    sizes_[0] = 1;
    for (int n = 1; n <= n_; ++n) sizes_[n] = sizes_[n - 1] * d_;
}

void WordBasis::word_of(int level, Eigen::Index idx, std::vector<int>& out) const {
    out.resize(level);
    for (int k = level - 1; k >= 0; --k) {
        out[k] = static_cast<int>(idx % d_);
        idx /= d_;
    }
}

Eigen::Index WordBasis::index_of(const std::vector<int>& word) const {
    Eigen::Index idx = 0;
    for (int letter : word) idx = idx * d_ + letter;
    return idx;
}

FockVector FockVector::zero(const WordBasis& b) {
    FockVector v;
    v.lev.resize(b.levels() + 1);
    for (int n = 0; n <= b.levels(); ++n) v.lev[n] = VectorXcd::Zero(b.size(n));
    return v;
}

FockVector FockVector::vacuum(const WordBasis& b) {
    FockVector v = zero(b);
    v.lev[0](0) = 1.0;
    return v;
}

FockVector& FockVector::operator+=(const FockVector& o) {
    for (size_t n = 0; n < lev.size() && n < o.lev.size(); ++n) lev[n] += o.lev[n];
    return *this;
}

FockVector& FockVector::operator*=(cplx c) {
    for (auto& l : lev) l *= c;
    return *this;
}

double FockVector::norm_ambient() const {
    double s = 0.0;
    for (const auto& l : lev) s += l.squaredNorm();
    return std::sqrt(s);
}

MatrixXcd twist_matrix(const Model& m) { return extend_twist(m, 1, 2); }

MatrixXcd extend_twist(const Model& m, int i, int n) {
    if (n < 2 || i < 1 || i > n - 1) throw std::invalid_argument("extend_twist: need 1 <= i <= n-1, n >= 2");
    const WordBasis b(m, n);
    MatrixXcd t = MatrixXcd::Zero(b.size(n), b.size(n));
    std::vector<int> w;
    for (Eigen::Index idx = 0; idx < b.size(n); ++idx) {
        b.word_of(n, idx, w);
        const double f = apply_generator(b, i, w);
        t(b.index_of(w), idx) += f;
    }
    return t;
}

std::vector<int> reduced_word(std::vector<int> perm) {
    // Bubble sort; swapping entries i-1, i multiplies by tau_i on the right,
    // so the reduced word is the reversed swap sequence.
    std::vector<int> swaps;
    const int n = static_cast<int>(perm.size());
    bool moved = true;
    while (moved) {
        moved = false;
        for (int i = 1; i < n; ++i)
            if (perm[i - 1] > perm[i]) {
                std::swap(perm[i - 1], perm[i]);
                swaps.push_back(i);
                moved = true;
            }
    }
    std::reverse(swaps.begin(), swaps.end());
    return swaps;
}

MatrixXcd pi_sigma(const Model& m, const std::vector<int>& perm) {
    require_permutation(perm);
    const int n = static_cast<int>(perm.size());
    if (n == 0) return MatrixXcd::Identity(1, 1);
    const WordBasis b(m, n);
    const std::vector<int> gens = reduced_word(perm);
    MatrixXcd out = MatrixXcd::Zero(b.size(n), b.size(n));
    std::vector<int> w;
    for (Eigen::Index idx = 0; idx < b.size(n); ++idx) {
        b.word_of(n, idx, w);
        const double f = apply_product(b, gens, w);
        out(b.index_of(w), idx) += f;
    }
    return out;
}

MatrixXcd p_matrix_bruteforce(const Model& m, int n) {
    if (n < 0) throw std::invalid_argument("p_matrix_bruteforce: negative level");
    if (n <= 1) return MatrixXcd::Identity(n == 0 ? 1 : m.dim(), n == 0 ? 1 : m.dim());
    const WordBasis b(m, n);
    MatrixXcd sum = MatrixXcd::Zero(b.size(n), b.size(n));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> w;
    do {
        const std::vector<int> gens = reduced_word(perm);
        for (Eigen::Index idx = 0; idx < b.size(n); ++idx) {
            b.word_of(n, idx, w);
            const double f = apply_product(b, gens, w);
            sum(b.index_of(w), idx) += f;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

TwistKernel::TwistKernel(const Model& m, int top_level, bool verify) : basis_(m, top_level) {
    const int top = basis_.levels();
    const int d = basis_.dim();
    p_.resize(top + 1);
    llt_.resize(top + 1);
    p_[0] = MatrixXcd::Identity(1, 1);
    if (top >= 1) p_[1] = MatrixXcd::Identity(d, d);
    std::vector<int> w, wj;
    for (int n = 2; n <= top; ++n) {
        const Eigen::Index sz = basis_.size(n);
        const Eigen::Index prev = basis_.size(n - 1);
        // R_n = 1 + T_1 + T_1 T_2 + ... + T_1...T_{n-1}, assembled wordwise.
        MatrixXcd r = MatrixXcd::Identity(sz, sz);
        for (Eigen::Index idx = 0; idx < sz; ++idx) {
            basis_.word_of(n, idx, w);
            for (int j = 1; j <= n - 1; ++j) {
                wj = w;
                double f = 1.0;
                for (int i = j; i >= 1; --i) f *= apply_generator(basis_, i, wj);
                r(basis_.index_of(wj), idx) += f;
            }
        }
        // (1 (x) P^(n-1)) is block diagonal over the first letter.
        MatrixXcd pn(sz, sz);
        for (int head = 0; head < d; ++head)
            pn.middleRows(head * prev, prev).noalias() = p_[n - 1] * r.middleRows(head * prev, prev);
        p_[n] = hermitize(pn);
    }
    for (int n = 0; n <= top; ++n) {
        llt_[n].compute(p_[n]);
        if (llt_[n].info() != Eigen::Success)
            throw std::runtime_error("level Gram is numerically singular (deformation too close to the boundary)");
    }
    if (verify) {
        for (int n = 2; n <= std::min(top, 5); ++n) {
            const double diff = (p_[n] - p_matrix_bruteforce(m, n)).norm();
            verify_residual_ = std::max(verify_residual_, diff);
        }
        if (verify_residual_ > 1e-10)
            throw std::runtime_error("level kernel ladder disagrees with the direct symmetric-group sum");
    }
}

cplx TwistKernel::inner_T(int level, const VectorXcd& u, const VectorXcd& v) const {
    return u.dot(p_[level] * v);
}

cplx TwistKernel::inner_T(const FockVector& u, const FockVector& v) const {
    cplx s = 0.0;
    const size_t top = std::min(u.lev.size(), v.lev.size());
    for (size_t n = 0; n < top; ++n) s += u.lev[n].dot(p_[n] * v.lev[n]);
    return s;
}

double TwistKernel::norm_T(const FockVector& u) const { return std::sqrt(std::max(0.0, inner_T(u, u).real())); }

double TwistKernel::block_norm_T(const MatrixXcd& x, int src, int dst) const {
    if (x.size() == 0) return 0.0;
    return gram_op_norm(x, p_[src], p_[dst]);
}

TwistKernel build_kernel(const Model& m, int top_level, bool verify) { return TwistKernel(m, top_level, verify); }

PositivityReport check_positivity(const Model& m, const TwistKernel& k, double floor) {
    (void)m;
    PositivityReport rep;
    rep.floor = floor;
    const int top = k.levels();
    rep.min_eig.assign(top + 1, 0.0);
    std::vector<std::future<double>> jobs;
    jobs.reserve(top + 1);
    for (int n = 0; n <= top; ++n)
        jobs.push_back(std::async(std::launch::async, [&k, n] { return min_eig_hermitian(k.p(n)); }));
    rep.positive = true;
    for (int n = 0; n <= top; ++n) {
        rep.min_eig[n] = jobs[n].get();
        if (!(rep.min_eig[n] > floor)) rep.positive = false;
    }
    return rep;
}

double check_yang_baxter(const Model& m) {
    const MatrixXcd t1 = extend_twist(m, 1, 3);
    const MatrixXcd t2 = extend_twist(m, 2, 3);
    return spectral_norm(t2 * t1 * t2 - t1 * t2 * t1);
}

}  // namespace tfock
