#include "tfock/probability.hpp"

#include <cmath>
#include <stdexcept>

namespace tfock {

namespace {

FockVector apply_field(const WordBasis& b, const VectorXcd& u, const FockVector& v) {
    FockVector out = apply_left_create(b, u, v);
    out += apply_left_annihilate(b, u, v);
    return out;
}

}  // namespace

MomentQuery basis_query(const Model& m, const std::vector<int>& coords) {
    MomentQuery q;
    for (int a : coords) {
        if (a < 0 || a >= m.dim()) throw std::invalid_argument("basis_query: coordinate out of range");
        VectorXcd e = VectorXcd::Zero(m.dim());
        e(a) = 1.0;
        q.letters.push_back(std::move(e));
        q.basis_index.push_back(a);
    }
    return q;
}

cplx vacuum_state(const WordBasis& b, const FockOperator& x) {
    return x.apply(FockVector::vacuum(b)).lev[0](0);
}

cplx vacuum_moment(const Model& m, const WordBasis& b, const TwistKernel& k, const MomentQuery& query) {
    const int kk = query.order();
    if (kk > 2 * (b.levels() - 1))
        throw std::invalid_argument("vacuum_moment: order exceeds 2*(levels - 1)");
    for (const auto& xi : query.letters)
        if (xi.size() != m.dim()) throw std::invalid_argument("vacuum_moment: letter has wrong dimension");
    if (kk % 2 == 1) return cplx(0.0);
    const int j = kk / 2;
    // <Omega, s_1...s_k Omega> = <s_j...s_1 Omega, s_{j+1}...s_k Omega>_T
    // (each factor is T-self-adjoint).
    FockVector left = FockVector::vacuum(b);
    for (int i = 0; i < j; ++i) left = apply_field(b, m.to_deformed_frame(query.letters[i]), left);
    FockVector right = FockVector::vacuum(b);
    for (int i = kk - 1; i >= j; --i) right = apply_field(b, m.to_deformed_frame(query.letters[i]), right);
    return k.inner_T(left, right);
}

namespace {

struct PairingWalk {
    const Model& m;
    const std::vector<int>& letters;  // coordinate indices
    int k;
    std::vector<int> partner;  // partner[i] or -1
    cplx total = 0.0;

    void walk() {
        int a = 0;
        while (a < k && partner[a] >= 0) ++a;
        if (a == k) {
            // Weight of the completed pairing.
            cplx w = 1.0;
            std::vector<std::pair<int, int>> pairs;
            for (int i = 0; i < k; ++i)
                if (partner[i] > i) pairs.emplace_back(i, partner[i]);
            for (const auto& [x, y] : pairs) w *= m.deformed_gram()(letters[x], letters[y]);
            for (size_t r = 0; r < pairs.size(); ++r)
                for (size_t s = r + 1; s < pairs.size(); ++s) {
                    const auto& [a1, b1] = pairs[r];
                    const auto& [a2, b2] = pairs[s];
                    const bool crossing = (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1);
                    if (crossing) w *= m.q(m.sector_of(letters[a1]), m.sector_of(letters[a2]));
                }
            total += w;
            return;
        }
        for (int bpos = a + 1; bpos < k; ++bpos) {
            if (partner[bpos] >= 0) continue;
            partner[a] = bpos;
            partner[bpos] = a;
            walk();
            partner[a] = -1;
            partner[bpos] = -1;
        }
    }
};

}  // namespace

cplx pair_partition_moment(const Model& m, const MomentQuery& query) {
    const int k = query.order();
    if (static_cast<int>(query.basis_index.size()) != k)
        throw std::invalid_argument("pair_partition_moment: query lacks basis labels");
    std::vector<int> letters(k);
    for (int i = 0; i < k; ++i) {
        const int a = query.basis_index[i];
        if (a < 0 || a >= m.dim())
            throw std::invalid_argument("pair_partition_moment: only coordinate-basis letters are supported");
        letters[i] = a;
    }
    if (k % 2 == 1) return cplx(0.0);
    PairingWalk pw{m, letters, k, std::vector<int>(k, -1)};
    pw.walk();
    return pw.total;
}

double centralizer_residual(const WordBasis& b, const FockOperator& x,
                            const std::vector<FockOperator>& samples) {
    const FockVector vac = FockVector::vacuum(b);
    const FockVector x_vac = x.apply(vac);
    double worst = 0.0;
    for (const FockOperator& y : samples) {
        const cplx xy = x.apply(y.apply(vac)).lev[0](0);
        const cplx yx = y.apply(x_vac).lev[0](0);
        worst = std::max(worst, std::abs(xy - yx));
    }
    return worst;
}

std::vector<double> oscillation_probe(const Model& m, const WordBasis& b, const TwistKernel& k,
                                      const VectorXcd& xi_coord, const std::vector<double>& t_grid) {
    for (double t : {0.61, 1.7}) {
        if ((m.u_matrix(t) * xi_coord - xi_coord).norm() > 1e-10 * std::max(1.0, xi_coord.norm()))
            throw std::invalid_argument("oscillation_probe: vector is not flow fixed");
    }
    const FockOperator s = field_s(m, b, xi_coord);

    const int top = b.levels();
    std::vector<Eigen::Index> off(top + 2, 0);
    for (int n = 0; n <= top; ++n) off[n + 1] = off[n] + b.size(n);
    const Eigen::Index full = off[top + 1];

    MatrixXcd smat = MatrixXcd::Zero(full, full);
    for (const auto& [key, blk] : s.blocks())
        smat.block(off[key.second], off[key.first], blk.rows(), blk.cols()) = blk;
    MatrixXcd pfull = MatrixXcd::Zero(full, full);
    for (int n = 0; n <= top; ++n)
        pfull.block(off[n], off[n], b.size(n), b.size(n)) = k.p(n);

    // Symmetrize against P, then eigendecompose: X = V diag(w) V^dagger P.
    const MatrixXcd herm = hermitize(0.5 * (pfull * smat + smat.adjoint() * pfull));
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> ges(herm, pfull,
                                                            Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success)
        throw std::runtime_error("oscillation_probe: eigensolve failed");
    const VectorXd w = ges.eigenvalues();
    const MatrixXcd v = ges.eigenvectors();
    // phi(exp(it s)) = sum_r V(0,r) (V^dagger P)(r,0) e^{it w_r}.
    const MatrixXcd vpc = v.adjoint() * pfull;
    VectorXcd coef(w.size());
    for (Eigen::Index r = 0; r < w.size(); ++r) coef(r) = v(0, r) * vpc(r, 0);

    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        cplx val = 0.0;
        for (Eigen::Index r = 0; r < w.size(); ++r) val += coef(r) * std::exp(cplx(0.0, t * w(r)));
        out.push_back(std::abs(val));
    }
    return out;
}

}  // namespace tfock
