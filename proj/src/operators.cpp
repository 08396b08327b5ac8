#include "tfock/operators.hpp"

#include <algorithm>
#include <stdexcept>

namespace tfock {

namespace {

// Each scan enumerates the matrix elements of a generator acting on level n
// as emit(src_index, dst_index, coeff); the matrix and matrix-free paths
// share these loops.

template <class F>
void scan_left_create(const WordBasis& b, const VectorXcd& xi, int n, F&& emit) {
    const Eigen::Index sz = b.size(n);
    for (int a = 0; a < b.dim(); ++a) {
        const cplx c = xi(a);
        if (c == cplx(0.0)) continue;
        const Eigen::Index base = static_cast<Eigen::Index>(a) * sz;
        for (Eigen::Index idx = 0; idx < sz; ++idx) emit(idx, base + idx, c);
    }
}

template <class F>
void scan_right_create(const WordBasis& b, const VectorXcd& xi, int n, F&& emit) {
    const Eigen::Index sz = b.size(n);
    const int d = b.dim();
    for (int a = 0; a < d; ++a) {
        const cplx c = xi(a);
        if (c == cplx(0.0)) continue;
        for (Eigen::Index idx = 0; idx < sz; ++idx) emit(idx, idx * d + a, c);
    }
}

template <class F>
void scan_left_annihilate(const WordBasis& b, const VectorXcd& xi, int n, F&& emit) {
    const Eigen::Index sz = b.size(n);
    std::vector<int> w, rest;
    for (Eigen::Index idx = 0; idx < sz; ++idx) {
        b.word_of(n, idx, w);
        for (int k = 0; k < n; ++k) {
            cplx c = std::conj(xi(w[k]));
            if (c == cplx(0.0)) continue;
            for (int j = 0; j < k; ++j) c *= b.q(w[k], w[j]);
            rest = w;
            rest.erase(rest.begin() + k);
            emit(idx, b.index_of(rest), c);
        }
    }
}

template <class F>
void scan_right_annihilate(const WordBasis& b, const VectorXcd& xi, int n, F&& emit) {
    const Eigen::Index sz = b.size(n);
    std::vector<int> w, rest;
    for (Eigen::Index idx = 0; idx < sz; ++idx) {
        b.word_of(n, idx, w);
        for (int k = 0; k < n; ++k) {
            cplx c = std::conj(xi(w[k]));
            if (c == cplx(0.0)) continue;
            for (int j = k + 1; j < n; ++j) c *= b.q(w[k], w[j]);
            rest = w;
            rest.erase(rest.begin() + k);
            emit(idx, b.index_of(rest), c);
        }
    }
}

enum class Gen { CreateLeft, AnnihilateLeft, CreateRight, AnnihilateRight };

struct Factor {
    Gen kind;
    VectorXcd vec;
};

template <class F>
void scan_factor(const WordBasis& b, const Factor& f, int n, F&& emit) {
    switch (f.kind) {
        case Gen::CreateLeft: scan_left_create(b, f.vec, n, emit); break;
        case Gen::AnnihilateLeft: scan_left_annihilate(b, f.vec, n, emit); break;
        case Gen::CreateRight: scan_right_create(b, f.vec, n, emit); break;
        case Gen::AnnihilateRight: scan_right_annihilate(b, f.vec, n, emit); break;
    }
}

FockOperator build_generator(const WordBasis& b, const Factor& f) {
    FockOperator op(b);
    const int top = b.levels();
    const bool creates = (f.kind == Gen::CreateLeft || f.kind == Gen::CreateRight);
    const int lo = creates ? 0 : 1;
    const int hi = creates ? top - 1 : top;
    for (int n = lo; n <= hi; ++n) {
        MatrixXcd& blk = op.mutable_block(n, creates ? n + 1 : n - 1);
        scan_factor(b, f, n, [&blk](Eigen::Index s, Eigen::Index t, cplx c) { blk(t, s) += c; });
    }
    return op;
}

FockVector apply_generator(const WordBasis& b, const Factor& f, const FockVector& v) {
    FockVector out = FockVector::zero(b);
    const int top = b.levels();
    const bool creates = (f.kind == Gen::CreateLeft || f.kind == Gen::CreateRight);
    const int lo = creates ? 0 : 1;
    const int hi = creates ? top - 1 : top;
    for (int n = lo; n <= hi; ++n) {
        if (v.lev[n].isZero(0)) continue;
        VectorXcd& dst = out.lev[creates ? n + 1 : n - 1];
        const VectorXcd& src = v.lev[n];
        scan_factor(b, f, n, [&dst, &src](Eigen::Index s, Eigen::Index t, cplx c) { dst(t) += c * src(s); });
    }
    return out;
}

void require_sector_letter(const Model& m, const WickLetter& l) {
    if (l.sector < 0 || l.sector >= m.sector_count())
        throw std::invalid_argument("wick word: sector index out of range");
    if (l.vec.size() != m.dim()) throw std::invalid_argument("wick word: letter has wrong dimension");
    const int off = m.sector_offset(l.sector);
    const int sd = m.sector_dim(l.sector);
    double off_mass = 0.0;
    for (int k = 0; k < m.dim(); ++k)
        if (k < off || k >= off + sd) off_mass += std::norm(l.vec(k));
    if (std::sqrt(off_mass) > 1e-12 * std::max(1.0, l.vec.norm()))
        throw std::invalid_argument("wick word: letter is not supported in a single sector");
}

// Display-order factor list of one splitting (creation part = set bits of
// mask, 1-based positions); the caller conjugates annihilation letters.
std::vector<Factor> splitting_factors(const WickWord& w, unsigned mask, bool right_side,
                                      const std::vector<VectorXcd>& conj_letters) {
    const int n = w.length();
    std::vector<Factor> fs;
    fs.reserve(n);
    if (!right_side) {
        for (int k = 1; k <= n; ++k)
            if (mask & (1u << (k - 1))) fs.push_back({Gen::CreateLeft, w.letters[k - 1].vec});
        for (int k = 1; k <= n; ++k)
            if (!(mask & (1u << (k - 1)))) fs.push_back({Gen::AnnihilateLeft, conj_letters[k - 1]});
    } else {
        for (int k = n; k >= 1; --k)
            if (mask & (1u << (k - 1))) fs.push_back({Gen::CreateRight, w.letters[k - 1].vec});
        for (int k = n; k >= 1; --k)
            if (!(mask & (1u << (k - 1)))) fs.push_back({Gen::AnnihilateRight, conj_letters[k - 1]});
    }
    return fs;
}

double splitting_coefficient(const Model& m, const WickWord& w, unsigned mask, bool right_side) {
    const int n = w.length();
    std::vector<int> labels(n), I, J;
    for (int k = 1; k <= n; ++k) {
        labels[k - 1] = w.letters[k - 1].sector;
        if (mask & (1u << (k - 1)))
            I.push_back(k);
        else
            J.push_back(k);
    }
    return crossing_coefficient(m, labels, I, J, right_side);
}

FockOperator wick_operator(const Model& m, const WordBasis& b, const WickWord& w, bool right_side) {
    for (const auto& l : w.letters) require_sector_letter(m, l);
    const int n = w.length();
    if (n > b.levels())
        throw std::invalid_argument("wick word longer than the truncation level (guard-band overflow)");
    std::vector<VectorXcd> conj_letters(n);
    for (int k = 0; k < n; ++k)
        conj_letters[k] = right_side ? m.conj_commutant(w.letters[k].vec) : m.conj_deformed(w.letters[k].vec);
    FockOperator out(b);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        const double f = splitting_coefficient(m, w, mask, right_side);
        const auto fs = splitting_factors(w, mask, right_side, conj_letters);
        FockOperator term = fs.empty() ? identity_op(b) : build_generator(b, fs.back());
        for (int k = static_cast<int>(fs.size()) - 2; k >= 0; --k)
            term = build_generator(b, fs[k]).compose(term);
        term *= f;
        out += term;
    }
    return out;
}

FockVector wick_apply(const Model& m, const WordBasis& b, const WickWord& w, const FockVector& v,
                      bool right_side) {
    for (const auto& l : w.letters) require_sector_letter(m, l);
    const int n = w.length();
    if (n > b.levels())
        throw std::invalid_argument("wick word longer than the truncation level (guard-band overflow)");
    std::vector<VectorXcd> conj_letters(n);
    for (int k = 0; k < n; ++k)
        conj_letters[k] = right_side ? m.conj_commutant(w.letters[k].vec) : m.conj_deformed(w.letters[k].vec);
    FockVector out = FockVector::zero(b);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        const double f = splitting_coefficient(m, w, mask, right_side);
        const auto fs = splitting_factors(w, mask, right_side, conj_letters);
        FockVector term = v;
        for (auto it = fs.rbegin(); it != fs.rend(); ++it) term = apply_generator(b, *it, term);
        term *= f;
        out += term;
    }
    return out;
}

}  // namespace

FockOperator::FockOperator(const WordBasis& b) {
    sizes_.resize(b.levels() + 1);
    for (int n = 0; n <= b.levels(); ++n) sizes_[n] = b.size(n);
}

const MatrixXcd& FockOperator::block(int src, int dst) const {
    auto it = blocks_.find({src, dst});
    if (it == blocks_.end()) throw std::logic_error("FockOperator::block: block not present");
    return it->second;
}

MatrixXcd& FockOperator::mutable_block(int src, int dst) {
    if (src < 0 || dst < 0 || src > levels() || dst > levels())
        throw std::logic_error("FockOperator::mutable_block: level out of range");
    auto it = blocks_.find({src, dst});
    if (it == blocks_.end())
        it = blocks_.emplace(std::make_pair(src, dst), MatrixXcd::Zero(sizes_[dst], sizes_[src])).first;
    return it->second;
}

int FockOperator::guard_degree() const {
    int g = 0;
    for (const auto& [key, blk] : blocks_)
        if (blk.cwiseAbs().maxCoeff() > 0.0) g = std::max(g, std::abs(key.second - key.first));
    return g;
}

FockVector FockOperator::apply(const FockVector& v) const {
    FockVector out;
    out.lev.resize(sizes_.size());
    for (size_t n = 0; n < sizes_.size(); ++n) out.lev[n] = VectorXcd::Zero(sizes_[n]);
    for (const auto& [key, blk] : blocks_) out.lev[key.second].noalias() += blk * v.lev[key.first];
    return out;
}

FockOperator FockOperator::compose(const FockOperator& rhs) const {
    if (sizes_ != rhs.sizes_) throw std::logic_error("FockOperator::compose: mismatched spaces");
    FockOperator out;
    out.sizes_ = sizes_;
    for (const auto& [rkey, rblk] : rhs.blocks_) {
        for (const auto& [lkey, lblk] : blocks_) {
            if (lkey.first != rkey.second) continue;
            auto it = out.blocks_.find({rkey.first, lkey.second});
            if (it == out.blocks_.end())
                it = out.blocks_.emplace(std::make_pair(rkey.first, lkey.second),
                                         MatrixXcd::Zero(sizes_[lkey.second], sizes_[rkey.first]))
                         .first;
            it->second.noalias() += lblk * rblk;
        }
    }
    return out;
}

FockOperator& FockOperator::operator+=(const FockOperator& o) {
    if (sizes_ != o.sizes_) throw std::logic_error("FockOperator::+=: mismatched spaces");
    for (const auto& [key, blk] : o.blocks_) {
        auto it = blocks_.find(key);
        if (it == blocks_.end())
            blocks_.emplace(key, blk);
        else
            it->second += blk;
    }
    return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& o) {
    if (sizes_ != o.sizes_) throw std::logic_error("FockOperator::-=: mismatched spaces");
    for (const auto& [key, blk] : o.blocks_) {
        auto it = blocks_.find(key);
        if (it == blocks_.end())
            blocks_.emplace(key, -blk);
        else
            it->second -= blk;
    }
    return *this;
}

FockOperator& FockOperator::operator*=(cplx c) {
    for (auto& [key, blk] : blocks_) blk *= c;
    return *this;
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) { return a.compose(b); }
FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
FockOperator operator*(cplx c, FockOperator a) { return a *= c; }

FockOperator identity_op(const WordBasis& b) {
    FockOperator op(b);
    for (int n = 0; n <= b.levels(); ++n)
        op.mutable_block(n, n) = MatrixXcd::Identity(b.size(n), b.size(n));
    return op;
}

FockOperator left_create(const WordBasis& b, const VectorXcd& xi) {
    return build_generator(b, {Gen::CreateLeft, xi});
}
FockOperator left_annihilate(const WordBasis& b, const VectorXcd& xi) {
    return build_generator(b, {Gen::AnnihilateLeft, xi});
}
FockOperator right_create(const WordBasis& b, const VectorXcd& xi) {
    return build_generator(b, {Gen::CreateRight, xi});
}
FockOperator right_annihilate(const WordBasis& b, const VectorXcd& xi) {
    return build_generator(b, {Gen::AnnihilateRight, xi});
}

FockVector apply_left_create(const WordBasis& b, const VectorXcd& xi, const FockVector& v) {
    return apply_generator(b, {Gen::CreateLeft, xi}, v);
}
FockVector apply_left_annihilate(const WordBasis& b, const VectorXcd& xi, const FockVector& v) {
    return apply_generator(b, {Gen::AnnihilateLeft, xi}, v);
}
FockVector apply_right_create(const WordBasis& b, const VectorXcd& xi, const FockVector& v) {
    return apply_generator(b, {Gen::CreateRight, xi}, v);
}
FockVector apply_right_annihilate(const WordBasis& b, const VectorXcd& xi, const FockVector& v) {
    return apply_generator(b, {Gen::AnnihilateRight, xi}, v);
}

FockOperator field_s(const Model& m, const WordBasis& b, const VectorXcd& xi_coord) {
    if (!m.is_real_vector(xi_coord))
        throw std::invalid_argument("field_s: argument must lie in the real coordinate space H_R");
    const VectorXcd u = m.to_deformed_frame(xi_coord);
    return left_create(b, u) + left_annihilate(b, u);
}

FockOperator field_d(const Model& m, const WordBasis& b, const VectorXcd& xi_coord) {
    const VectorXcd u = m.to_deformed_frame(xi_coord);
    if (m.commutant_distance(u) > 1e-9 * std::max(1.0, u.norm()))
        throw std::invalid_argument("field_d: argument must lie in the commutant subspace H_R'");
    return right_create(b, u) + right_annihilate(b, u);
}

double crossing_coefficient(const Model& m, const std::vector<int>& labels,
                            const std::vector<int>& I, const std::vector<int>& J, bool right_side) {
    const int n = static_cast<int>(labels.size());
    std::vector<int> all;
    all.reserve(I.size() + J.size());
    all.insert(all.end(), I.begin(), I.end());
    all.insert(all.end(), J.begin(), J.end());
    std::sort(all.begin(), all.end());
    bool ok = static_cast<int>(all.size()) == n;
    for (int k = 0; ok && k < n; ++k) ok = (all[k] == k + 1);
    ok = ok && std::is_sorted(I.begin(), I.end()) && std::is_sorted(J.begin(), J.end());
    if (!ok) throw std::invalid_argument("crossing_coefficient: (I, J) must partition 1..n in ascending order");
    for (int s : labels)
        if (s < 0 || s >= m.sector_count())
            throw std::invalid_argument("crossing_coefficient: sector label out of range");
    double f = 1.0;
    for (int i : I)
        for (int j : J)
            if (right_side ? (i < j) : (i > j)) f *= m.q(labels[i - 1], labels[j - 1]);
    return f;
}

WickWord WickWord::from_basis(const WordBasis& b, const std::vector<int>& letter_indices) {
    WickWord w;
    for (int a : letter_indices) {
        if (a < 0 || a >= b.dim()) throw std::invalid_argument("WickWord::from_basis: letter out of range");
        WickLetter l;
        l.sector = b.sector(a);
        l.vec = VectorXcd::Zero(b.dim());
        l.vec(a) = 1.0;
        w.letters.push_back(std::move(l));
    }
    return w;
}

FockOperator wick_s(const Model& m, const WordBasis& b, const WickWord& w) {
    return wick_operator(m, b, w, false);
}

FockOperator wick_d(const Model& m, const WordBasis& b, const WickWord& w) {
    return wick_operator(m, b, w, true);
}

FockVector apply_wick_s(const Model& m, const WordBasis& b, const WickWord& w, const FockVector& v) {
    return wick_apply(m, b, w, v, false);
}

FockVector apply_wick_d(const Model& m, const WordBasis& b, const WickWord& w, const FockVector& v) {
    return wick_apply(m, b, w, v, true);
}

WickTable::WickTable(const Model& m, const WordBasis& b, int top_level) {
    if (top_level < 0 || top_level > b.levels())
        throw std::invalid_argument("WickTable: top level out of range");
    const int d = b.dim();
    std::vector<FockOperator> cre(d), ann(d);
    for (int a = 0; a < d; ++a) {
        VectorXcd e = VectorXcd::Zero(d);
        e(a) = 1.0;
        cre[a] = left_create(b, e);
        ann[a] = left_annihilate(b, m.conj_deformed(e));
    }
    ops_.resize(top_level + 1);
    std::vector<int> w;
    for (int n = 0; n <= top_level; ++n) {
        ops_[n].reserve(b.size(n));
        for (Eigen::Index idx = 0; idx < b.size(n); ++idx) {
            b.word_of(n, idx, w);
            std::vector<int> labels(n);
            for (int k = 0; k < n; ++k) labels[k] = b.sector(w[k]);
            FockOperator acc(b);
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                std::vector<int> I, J;
                for (int k = 1; k <= n; ++k)
                    (mask & (1u << (k - 1)) ? I : J).push_back(k);
                const double f = crossing_coefficient(m, labels, I, J, false);
                std::vector<const FockOperator*> fs;
                for (int i : I) fs.push_back(&cre[w[i - 1]]);
                for (int j : J) fs.push_back(&ann[w[j - 1]]);
                FockOperator term = fs.empty() ? identity_op(b) : *fs.back();
                for (int k = static_cast<int>(fs.size()) - 2; k >= 0; --k)
                    term = fs[k]->compose(term);
                term *= f;
                acc += term;
            }
            ops_[n].push_back(std::move(acc));
        }
    }
}

FockOperator WickTable::quantize(const FockVector& v) const {
    if (ops_.empty()) throw std::logic_error("WickTable::quantize: empty table");
    FockOperator acc = ops_[0][0];
    acc *= cplx(0.0);
    for (int n = 0; n <= top() && n < static_cast<int>(v.lev.size()); ++n)
        for (Eigen::Index idx = 0; idx < v.lev[n].size(); ++idx) {
            const cplx c = v.lev[n](idx);
            if (c != cplx(0.0)) acc += c * ops_[n][idx];
        }
    return acc;
}

FockOperator adjoint_T(const TwistKernel& k, const FockOperator& x) {
    FockOperator out = x;  // copy sizes; blocks replaced below
    out -= x;              // zero all blocks, keep the level layout
    for (const auto& [key, blk] : x.blocks()) {
        const int src = key.first, dst = key.second;
        const MatrixXcd rhs = blk.adjoint() * k.p(dst);
        out.mutable_block(dst, src) += k.solve_p(src, rhs);
    }
    return out;
}

double op_norm_T(const TwistKernel& k, const FockOperator& x, int max_src) {
    const int top = max_src < 0 ? x.levels() : std::min(max_src, x.levels());
    double best = 0.0;
    for (int n = 0; n <= top; ++n) {
        MatrixXcd g;
        bool any = false;
        for (const auto& [key, blk] : x.blocks()) {
            if (key.first != n) continue;
            const MatrixXcd term = blk.adjoint() * k.p(key.second) * blk;
            if (!any) {
                g = term;
                any = true;
            } else {
                g += term;
            }
        }
        if (!any) continue;
        best = std::max(best, std::sqrt(std::max(0.0, gevp_max(g, k.p(n)))));
    }
    return best;
}

}  // namespace tfock
