#include "tfock/modular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfock {

namespace {

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

MatrixXcd kron_pow(const MatrixXcd& a, int n) {
    MatrixXcd out = MatrixXcd::Identity(1, 1);
    for (int k = 0; k < n; ++k) out = kron(out, a);
    return out;
}

// Permutation matrix reversing the letter order of level-n words.
MatrixXcd reversal_perm(const WordBasis& b, int n) {
    const Eigen::Index sz = b.size(n);
    MatrixXcd perm = MatrixXcd::Zero(sz, sz);
    std::vector<int> w, r;
    for (Eigen::Index idx = 0; idx < sz; ++idx) {
        b.word_of(n, idx, w);
        r.assign(w.rbegin(), w.rend());
        perm(b.index_of(r), idx) = 1.0;
    }
    return perm;
}

VectorXcd unit_vec(int d, int a) {
    VectorXcd e = VectorXcd::Zero(d);
    e(a) = 1.0;
    return e;
}

double rel(double num, double den) { return num / std::max(den, 1e-300); }

}  // namespace

MatrixXcd ModularData::delta_power(int level, double p) const {
    const MatrixXcd& v = delta_vecs[level];
    const VectorXd& mu = delta_eigs[level];
    VectorXcd f(mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i) f(i) = std::pow(mu(i), p);
    return v * f.asDiagonal() * v.adjoint() * delta_gram_[level];
}

MatrixXcd ModularData::delta_unitary(int level, double t) const {
    const MatrixXcd& v = delta_vecs[level];
    const VectorXd& mu = delta_eigs[level];
    VectorXcd f(mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i)
        f(i) = std::exp(cplx(0.0, t * std::log(mu(i))));
    return v * f.asDiagonal() * v.adjoint() * delta_gram_[level];
}

VectorXcd ModularData::apply_S(int level, const VectorXcd& v) const {
    return s_lin[level] * v.conjugate();
}

VectorXcd ModularData::apply_J(int level, const VectorXcd& v) const {
    return j_lin[level] * v.conjugate();
}

ModularData build_modular(const Model& m, const WordBasis& b, const TwistKernel& k,
                          const WickTable& table, int g_mod) {
    if (g_mod < 1) throw std::invalid_argument("build_modular: guard band must be >= 1");
    const int top = std::max(0, b.levels() - g_mod);
    if (table.top() < top)
        throw std::invalid_argument("build_modular: wick table does not reach the guard band");

    ModularData md;
    md.top = top;
    md.g_mod = g_mod;
    md.s_lin.resize(top + 1);
    md.delta.resize(top + 1);
    md.j_lin.resize(top + 1);
    md.delta_eigs.resize(top + 1);
    md.delta_vecs.resize(top + 1);
    md.delta_gram_.resize(top + 1);

    // A^{-1} in the word-coordinate (deformed) frame, for the tensor-power
    // diagnostic.
    const int d = m.dim();
    MatrixXcd ainv_def(d, d);
    {
        const MatrixXcd ainv = m.a_power(-1.0);
        for (int j = 0; j < d; ++j)
            ainv_def.col(j) = m.to_deformed_frame(ainv * m.from_deformed_frame(unit_vec(d, j)));
    }

    for (int n = 0; n <= top; ++n) {
        const Eigen::Index sz = b.size(n);
        const MatrixXcd& p = k.p(n);
        MatrixXcd s = MatrixXcd::Zero(sz, sz);
        for (Eigen::Index idx = 0; idx < sz; ++idx) {
            const FockOperator& x = table.op(n, idx);
            // x*Omega: level-kk component = P^(kk)^{-1} (block kk->0)^dagger.
            double off2 = 0.0;
            for (int kk = 0; kk <= x.levels(); ++kk) {
                if (!x.has_block(kk, 0)) continue;
                const VectorXcd rhs = x.block(kk, 0).adjoint();
                const VectorXcd comp = k.solve_p(kk, rhs);
                if (kk == n) {
                    s.col(idx) = comp;
                } else {
                    off2 += std::real(comp.dot(k.p(kk) * comp));
                }
            }
            const double on = std::sqrt(std::max(0.0, std::real(s.col(idx).dot(p * s.col(idx)))));
            md.off_level_mass = std::max(md.off_level_mass, rel(std::sqrt(std::max(0.0, off2)), on));
        }

        Eigen::FullPivLU<MatrixXcd> lu(s);
        if (lu.rank() < sz)
            throw std::runtime_error("build_modular: conjugation frame is rank deficient (truncation too small)");

        const MatrixXcd mmat = hermitize((s.adjoint() * p * s).conjugate());
        Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> ges(mmat, p,
                                                                Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
        if (ges.info() != Eigen::Success)
            throw std::runtime_error("build_modular: generalized eigensolve failed");
        const VectorXd mu = ges.eigenvalues();
        if (mu.minCoeff() <= 1e-14 * std::max(1.0, mu.maxCoeff()))
            throw std::runtime_error("build_modular: Delta block failed positivity (truncation artifact)");
        const MatrixXcd v = ges.eigenvectors();  // v^dagger P v = identity

        md.s_lin[n] = s;
        md.delta_eigs[n] = mu;
        md.delta_vecs[n] = v;
        md.delta_gram_[n] = p;
        md.delta[n] = v * mu.asDiagonal() * v.adjoint() * p;

        const MatrixXcd dinvhalf = md.delta_power(n, -0.5);
        const MatrixXcd dhalf = md.delta_power(n, 0.5);
        md.j_lin[n] = s * dinvhalf.conjugate();

        const double sn = spectral_norm(s);
        md.polar_residual =
            std::max(md.polar_residual, rel(spectral_norm(s - md.j_lin[n] * dhalf.conjugate()), std::max(1.0, sn)));
        md.s_square_residual = std::max(
            md.s_square_residual, spectral_norm(s * s.conjugate() - MatrixXcd::Identity(sz, sz)));
        md.j_square_residual = std::max(
            md.j_square_residual,
            spectral_norm(md.j_lin[n] * md.j_lin[n].conjugate() - MatrixXcd::Identity(sz, sz)));

        const MatrixXcd rev_cand = reversal_perm(b, n) * kron_pow(m.conj_linear(), n);
        md.reversal_residual =
            std::max(md.reversal_residual, rel(spectral_norm(s - rev_cand), std::max(1.0, sn)));
        const MatrixXcd tensor_cand = kron_pow(ainv_def, n);
        md.tensor_candidate_residual = std::max(
            md.tensor_candidate_residual,
            rel(spectral_norm(md.delta[n] - tensor_cand), std::max(1.0, spectral_norm(md.delta[n]))));
    }
    return md;
}

namespace {

// Restriction of x to blocks with src <= max_src and dst <= max_dst.
FockOperator restrict_blocks(const WordBasis& b, const FockOperator& x, int max_src, int max_dst) {
    FockOperator out(b);
    for (const auto& [key, blk] : x.blocks())
        if (key.first <= max_src && key.second <= max_dst) out.mutable_block(key.first, key.second) = blk;
    return out;
}

}  // namespace

FockOperator conjugate_by_modular_J(const WordBasis& b, const ModularData& md,
                                    const FockOperator& x) {
    FockOperator out(b);
    for (const auto& [key, blk] : x.blocks()) {
        const int src = key.first, dst = key.second;
        if (src > md.top - 1 || dst > md.top) continue;
        out.mutable_block(src, dst) = md.j_lin[dst] * (blk * md.j_lin[src]).conjugate();
    }
    return out;
}

double check_commutant_relation(const Model& m, const WordBasis& b, const TwistKernel& k,
                                const ModularData& md, const VectorXcd& xi_coord) {
    if (md.top < 1) return 0.0;
    const FockOperator x = field_s(m, b, xi_coord);
    const FockOperator jxj = conjugate_by_modular_J(b, md, x);
    const FockOperator y = field_d(m, b, commutant_vector(m, xi_coord));
    const FockOperator yres = restrict_blocks(b, y, md.top - 1, md.top);
    return rel(op_norm_T(k, jxj - yres, md.top - 1), op_norm_T(k, yres, md.top - 1));
}

double modular_flow_residual(const Model& m, const WordBasis& b, const TwistKernel& k,
                             const ModularData& md, double t, const VectorXcd& xi_coord) {
    if (md.top < 1) return 0.0;
    const FockOperator x = field_s(m, b, xi_coord);
    FockOperator lhs(b);
    for (const auto& [key, blk] : x.blocks()) {
        const int src = key.first, dst = key.second;
        if (src > md.top - 1 || dst > md.top) continue;
        lhs.mutable_block(src, dst) = md.delta_unitary(dst, t) * blk * md.delta_unitary(src, -t);
    }
    const FockOperator rhs =
        restrict_blocks(b, field_s(m, b, m.u_matrix(-t) * xi_coord), md.top - 1, md.top);
    return rel(op_norm_T(k, lhs - rhs, md.top - 1), op_norm_T(k, rhs, md.top - 1));
}

ExpectationData build_expectation(const Model& m, const WordBasis& b, const TwistKernel& k,
                                  const WickTable& table, const std::vector<int>& sectors) {
    ExpectationData ed;
    ed.sectors = sectors;
    std::sort(ed.sectors.begin(), ed.sectors.end());
    ed.sectors.erase(std::unique(ed.sectors.begin(), ed.sectors.end()), ed.sectors.end());
    for (int s : ed.sectors)
        if (s < 0 || s >= m.sector_count())
            throw std::invalid_argument("build_expectation: sector index out of range");

    const int d = m.dim();
    std::vector<char> in_d_letter(d, 0);
    for (int a = 0; a < d; ++a)
        in_d_letter[a] = std::binary_search(ed.sectors.begin(), ed.sectors.end(), m.sector_of(a)) ? 1 : 0;

    // Flow invariance of the coordinate span of D.
    {
        MatrixXd pd = MatrixXd::Zero(d, d);
        for (int a = 0; a < d; ++a)
            if (in_d_letter[a]) pd(a, a) = 1.0;
        const MatrixXcd id = MatrixXcd::Identity(d, d);
        for (double t : {0.37, 1.1, 2.9}) {
            const MatrixXcd u = m.u_matrix(t);
            ed.invariance_residual =
                std::max(ed.invariance_residual, spectral_norm((id - pd.cast<cplx>()) * u * pd.cast<cplx>()));
        }
        if (ed.invariance_residual > 1e-10)
            throw std::invalid_argument("build_expectation: subspace is not flow invariant");
    }

    ed.top = table.top();
    ed.table = &table;
    ed.word_sel.resize(ed.top + 1);
    ed.proj.resize(ed.top + 1);
    ed.perp.resize(ed.top + 1);

    const MatrixXcd& comm = m.commutant_frame();
    std::vector<int> w;
    for (int n = 0; n <= ed.top; ++n) {
        const Eigen::Index sz = b.size(n);
        const MatrixXcd& p = k.p(n);

        std::vector<Eigen::Index> sel;
        std::vector<Eigen::Index> perp_words;
        for (Eigen::Index idx = 0; idx < sz; ++idx) {
            b.word_of(n, idx, w);
            bool all_d = true;
            for (int a : w) all_d = all_d && in_d_letter[a];
            (all_d ? sel : perp_words).push_back(idx);
        }
        ed.word_sel[n] = sel;

        const Eigen::Index r = static_cast<Eigen::Index>(sel.size());
        if (r == 0) {
            ed.proj[n] = MatrixXcd::Zero(sz, sz);
        } else {
            MatrixXcd psel(r, r), prows(r, sz);
            for (Eigen::Index i = 0; i < r; ++i) {
                prows.row(i) = p.row(sel[i]);
                for (Eigen::Index j = 0; j < r; ++j) psel(i, j) = p(sel[i], sel[j]);
            }
            const MatrixXcd sol = Eigen::LLT<MatrixXcd>(psel).solve(prows);
            ed.proj[n] = MatrixXcd::Zero(sz, sz);
            for (Eigen::Index i = 0; i < r; ++i) ed.proj[n].row(sel[i]) = sol.row(i);
        }

        // Word basis of the complement: commutant-frame letters, at least one
        // of them from a sector outside D.
        MatrixXcd perp(sz, static_cast<Eigen::Index>(perp_words.size()));
        for (Eigen::Index c = 0; c < perp.cols(); ++c) {
            b.word_of(n, perp_words[c], w);
            VectorXcd col = VectorXcd::Ones(1);
            for (int a : w) {
                VectorXcd next(col.size() * d);
                for (Eigen::Index i = 0; i < col.size(); ++i)
                    next.segment(i * d, d) = col(i) * comm.col(a);
                col = std::move(next);
            }
            perp.col(c) = col;
        }
        ed.perp[n] = perp;

        if (perp.cols() == 0) continue;
        const MatrixXcd comp = complex_range(MatrixXcd::Identity(sz, sz) - ed.proj[n]);
        ed.perp_angle_max = std::max(ed.perp_angle_max, subspace_angle(perp, comp, p));
    }
    return ed;
}

FockOperator conditional_expectation(const WordBasis& b, const ExpectationData& ed,
                                     const FockOperator& x) {
    if (ed.table == nullptr) throw std::logic_error("conditional_expectation: missing wick table");
    const FockVector v = x.apply(FockVector::vacuum(b));
    double total2 = 0.0, high2 = 0.0;
    for (int n = 0; n < static_cast<int>(v.lev.size()); ++n) {
        const double m2 = v.lev[n].squaredNorm();
        total2 += m2;
        if (n > ed.top) high2 += m2;
    }
    if (std::sqrt(high2) > 1e-8 * std::max(1.0, std::sqrt(total2)))
        throw std::invalid_argument("conditional_expectation: operator exceeds the guard band");
    FockVector proj = FockVector::zero(b);
    for (int n = 0; n <= ed.top; ++n) proj.lev[n] = ed.proj[n] * v.lev[n];
    return ed.table->quantize(proj);
}

}  // namespace tfock
