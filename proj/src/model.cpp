#include "tfock/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tfock {

namespace {

std::string cat(const std::vector<std::string>& parts) {
    std::ostringstream os;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) os << "; ";
        os << parts[i];
    }
    return os.str();
}

}  // namespace

std::vector<std::string> validate_spec(const ModelSpec& spec) {
    std::vector<std::string> bad;
    const int nsec = static_cast<int>(spec.sector_dims.size());
    if (nsec == 0) bad.push_back("at least one sector is required");
    for (int s = 0; s < nsec; ++s)
        if (spec.sector_dims[s] < 1) {
            std::ostringstream os;
            os << "sector " << s << " has dimension " << spec.sector_dims[s] << " (must be >= 1)";
            bad.push_back(os.str());
        }
    if (spec.q.rows() != nsec || spec.q.cols() != nsec) {
        std::ostringstream os;
        os << "q must be a " << nsec << "x" << nsec << " matrix, got " << spec.q.rows() << "x"
           << spec.q.cols();
        bad.push_back(os.str());
    } else {
        for (int i = 0; i < nsec; ++i)
            for (int j = 0; j < nsec; ++j) {
                if (j > i && spec.q(i, j) != spec.q(j, i)) {
                    std::ostringstream os;
                    os << "q(" << i << "," << j << ") != q(" << j << "," << i << "): the deformation matrix must be symmetric";
                    bad.push_back(os.str());
                }
                if (std::abs(spec.q(i, j)) >= 1.0 && j >= i) {
                    std::ostringstream os;
                    os << "|q(" << i << "," << j << ")| = " << std::abs(spec.q(i, j))
                       << " violates the strict bound |q| < 1";
                    bad.push_back(os.str());
                }
            }
    }
    std::vector<bool> used;
    int dim = 0;
    for (int s = 0; s < nsec; ++s) dim += std::max(0, spec.sector_dims[s]);
    used.assign(static_cast<size_t>(std::max(0, dim)), false);
    std::vector<int> offsets(static_cast<size_t>(nsec), 0);
    for (int s = 1; s < nsec; ++s) offsets[s] = offsets[s - 1] + std::max(0, spec.sector_dims[s - 1]);
    for (size_t b = 0; b < spec.blocks.size(); ++b) {
        const auto& blk = spec.blocks[b];
        std::ostringstream os;
        os << "rotation block " << b << ": ";
        if (blk.sector < 0 || blk.sector >= nsec) {
            os << "sector index " << blk.sector << " out of range";
            bad.push_back(os.str());
            continue;
        }
        const int sd = spec.sector_dims[blk.sector];
        if (blk.coord_a < 0 || blk.coord_a >= sd || blk.coord_b < 0 || blk.coord_b >= sd) {
            os << "coordinates (" << blk.coord_a << "," << blk.coord_b << ") outside sector of dimension " << sd;
            bad.push_back(os.str());
            continue;
        }
        if (blk.coord_a == blk.coord_b) {
            os << "coordinates must be distinct";
            bad.push_back(os.str());
            continue;
        }
        if (!(blk.lambda > 1.0)) {
            os << "lambda = " << blk.lambda << " must exceed 1 (canonical orientation)";
            bad.push_back(os.str());
            continue;
        }
        const int ga = offsets[blk.sector] + blk.coord_a;
        const int gb = offsets[blk.sector] + blk.coord_b;
        if (used[ga] || used[gb]) {
            os << "coordinate reuse: rotation blocks must act on disjoint pairs";
            bad.push_back(os.str());
            continue;
        }
        used[ga] = used[gb] = true;
    }
    if (spec.level < 1) bad.push_back("truncation level must be >= 1");
    if (dim >= 1 && spec.level >= 1) {
        double words = std::pow(static_cast<double>(dim), spec.level);
        if (words > (1 << 21)) bad.push_back("d^level exceeds the supported truncated-space size (2^21 words per level)");
    }
    return bad;
}

Model::Model(const ModelSpec& spec) : spec_(spec) {
    const auto bad = validate_spec(spec);
    if (!bad.empty()) throw std::invalid_argument("invalid model spec: " + cat(bad));

    const int nsec = sector_count();
    offsets_.assign(nsec, 0);
    for (int s = 1; s < nsec; ++s) offsets_[s] = offsets_[s - 1] + spec_.sector_dims[s - 1];
    dim_ = offsets_[nsec - 1] + spec_.sector_dims[nsec - 1];
    sector_of_.assign(dim_, 0);
    for (int s = 0; s < nsec; ++s)
        for (int k = 0; k < spec_.sector_dims[s]; ++k) sector_of_[offsets_[s] + k] = s;
    q_max_ = spec_.q.cwiseAbs().maxCoeff();

    // Deformed Gram 2(1+A^{-1})^{-1}, Hermitian positive definite.
    const MatrixXcd id = MatrixXcd::Identity(dim_, dim_);
    const MatrixXcd m = id + a_power(-1.0);
    gram_ = 2.0 * Eigen::LLT<MatrixXcd>(hermitize(m)).solve(id);
    gram_ = hermitize(gram_);

    // Per-sector Gram-Schmidt against the deformed Gram (via Cholesky).
    frame_ = MatrixXcd::Zero(dim_, dim_);
    frame_inv_ = MatrixXcd::Zero(dim_, dim_);
    for (int s = 0; s < nsec; ++s) {
        const int off = offsets_[s];
        const int sd = spec_.sector_dims[s];
        const MatrixXcd gs = gram_.block(off, off, sd, sd);
        Eigen::LLT<MatrixXcd> llt(gs);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("deformed Gram is not positive definite on a sector block");
        const MatrixXcd lh = llt.matrixL().adjoint();  // upper triangular
        const MatrixXcd ids = MatrixXcd::Identity(sd, sd);
        frame_.block(off, off, sd, sd) = lh.triangularView<Eigen::Upper>().solve(ids);
        frame_inv_.block(off, off, sd, sd) = lh;
    }
    conj_lin_ = frame_inv_ * frame_.conjugate();

    // Commutant subspaces (H_R^(j))', one real-linear solve per sector.
    comm_basis_.resize(nsec);
    comm_frame_ = MatrixXcd::Zero(dim_, dim_);
    int col = 0;
    for (int s = 0; s < nsec; ++s) {
        const int off = offsets_[s];
        const int sd = spec_.sector_dims[s];
        MatrixXd cond(sd, 2 * sd);
        for (int k = 0; k < sd; ++k)
            for (int mm = 0; mm < sd; ++mm) {
                cond(k, mm) = gram_(off + mm, off + k).imag();
                cond(k, sd + mm) = -gram_(off + mm, off + k).real();
            }
        const MatrixXd ker = real_kernel(cond);
        if (ker.cols() != sd)
            throw std::runtime_error("commutant subspace has unexpected real dimension on a sector");
        MatrixXcd basis = MatrixXcd::Zero(dim_, sd);
        for (int c = 0; c < sd; ++c)
            for (int mm = 0; mm < sd; ++mm)
                basis(off + mm, c) = cplx(ker(mm, c), ker(sd + mm, c));
        comm_basis_[s] = basis;
        comm_frame_.middleCols(col, sd) = frame_inv_ * basis;
        col += sd;
    }

    // Real/imag split of the commutant frame, used to conjugate and to
    // measure distances against the real span of H_R'.
    MatrixXd split(2 * dim_, 2 * dim_);
    split.topLeftCorner(dim_, dim_) = comm_frame_.real();
    split.topRightCorner(dim_, dim_) = -comm_frame_.imag();
    split.bottomLeftCorner(dim_, dim_) = comm_frame_.imag();
    split.bottomRightCorner(dim_, dim_) = comm_frame_.real();
    comm_solver_.compute(split);
    if (comm_solver_.rank() < 2 * dim_)
        throw std::runtime_error("commutant subspaces do not complexify to the full space");
}

MatrixXcd Model::a_power(double p) const {
    MatrixXcd a = MatrixXcd::Identity(dim_, dim_);
    for (const auto& blk : spec_.blocks) {
        const int ga = offsets_[blk.sector] + blk.coord_a;
        const int gb = offsets_[blk.sector] + blk.coord_b;
        const double L = std::log(blk.lambda);
        a(ga, ga) = a(gb, gb) = std::cosh(p * L);
        a(ga, gb) = cplx(0.0, std::sinh(p * L));
        a(gb, ga) = cplx(0.0, -std::sinh(p * L));
    }
    return a;
}

MatrixXcd Model::u_matrix(double t) const {
    MatrixXcd u = MatrixXcd::Identity(dim_, dim_);
    for (const auto& blk : spec_.blocks) {
        const int ga = offsets_[blk.sector] + blk.coord_a;
        const int gb = offsets_[blk.sector] + blk.coord_b;
        const double th = t * std::log(blk.lambda);
        u(ga, ga) = u(gb, gb) = std::cos(th);
        u(ga, gb) = -std::sin(th);
        u(gb, ga) = std::sin(th);
    }
    return u;
}

VectorXcd Model::conj_commutant(const VectorXcd& v) const {
    VectorXd rhs(2 * dim_);
    rhs.head(dim_) = v.real();
    rhs.tail(dim_) = v.imag();
    const VectorXd ab = comm_solver_.solve(rhs);
    const VectorXcd coeff = ab.head(dim_).cast<cplx>() - cplx(0, 1) * ab.tail(dim_).cast<cplx>();
    return comm_frame_ * coeff;
}

bool Model::is_real_vector(const VectorXcd& v_coord, double tol) const {
    return v_coord.imag().cwiseAbs().maxCoeff() <= tol * std::max(1.0, v_coord.norm());
}

double Model::commutant_distance(const VectorXcd& v_deformed) const {
    VectorXd rhs(2 * dim_);
    rhs.head(dim_) = v_deformed.real();
    rhs.tail(dim_) = v_deformed.imag();
    const VectorXd ab = comm_solver_.solve(rhs);
    const VectorXcd imag_part = cplx(0, 1) * ab.tail(dim_).cast<cplx>();
    return (comm_frame_ * imag_part).norm();
}

Model build_model(const ModelSpec& spec) { return Model(spec); }

cplx deformed_inner(const Model& m, const VectorXcd& xi, const VectorXcd& eta) {
    return xi.dot(m.deformed_gram() * eta);
}

VectorXcd apply_Ut(const Model& m, double t, const VectorXcd& xi) { return m.u_matrix(t) * xi; }

VectorXcd commutant_vector(const Model& m, const VectorXcd& xi) {
    if (!m.is_real_vector(xi))
        throw std::invalid_argument("commutant_vector: input must lie in the real coordinate space");
    return m.a_power(-0.5) * xi;
}

MatrixXcd commutant_subspace_basis(const Model& m, int sector) {
    if (sector < 0 || sector >= m.sector_count())
        throw std::invalid_argument("commutant_subspace_basis: sector index out of range");
    return m.commutant_basis(sector);
}

}  // namespace tfock
