#pragma once

// One-particle layer: a finite-dimensional real space split into sectors,
// a symmetric deformation matrix q with one entry per sector pair, and an
// orthogonal flow U_t assembled from plane rotations with speeds log(lambda).
//
// Conventions used throughout the library:
//   * inner products are linear in the SECOND argument;
//   * the deformed pairing is <xi, eta>_U = <2(1+A^{-1})^{-1} xi, eta> where
//     A is the positive generator of U_t = A^{it};
//   * "coordinate frame" means the real basis e_0..e_{d-1} in which H_R is
//     the set of real vectors;  "deformed frame" means the per-sector basis
//     obtained by Gram-Schmidt against the deformed Gram matrix, in which
//     the deformed pairing is the standard one.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfock/linalg.hpp"

namespace tfock {

struct RotationBlock {
    int sector = 0;
    int coord_a = 0;  // local coordinates within the sector
    int coord_b = 1;
    double lambda = 2.0;  // eigenvalue pair {lambda, 1/lambda}, lambda > 1
};

struct ModelSpec {
    std::vector<int> sector_dims;
    MatrixXd q;  // symmetric, |q_ij| < 1
    std::vector<RotationBlock> blocks;
    int level = 6;  // Fock truncation depth N
};

// Returns one message per violated requirement; empty means the spec is sound.
std::vector<std::string> validate_spec(const ModelSpec& spec);

class Model {
public:
    explicit Model(const ModelSpec& spec);

    const ModelSpec& spec() const { return spec_; }
    int dim() const { return dim_; }
    int level() const { return spec_.level; }
    int sector_count() const { return static_cast<int>(spec_.sector_dims.size()); }
    int sector_offset(int s) const { return offsets_[s]; }
    int sector_dim(int s) const { return spec_.sector_dims[s]; }
    int sector_of(int coord) const { return sector_of_[coord]; }
    double q(int si, int sj) const { return spec_.q(si, sj); }
    double q_max() const { return q_max_; }

    // Generator powers A^p and the flow U_t, both in the coordinate frame.
    MatrixXcd a_power(double p) const;
    MatrixXcd u_matrix(double t) const;

    const MatrixXcd& deformed_gram() const { return gram_; }

    // Frame changes: columns of `frame()` are the deformed-frame basis
    // vectors written in coordinates.
    const MatrixXcd& frame() const { return frame_; }
    VectorXcd to_deformed_frame(const VectorXcd& v) const { return frame_inv_ * v; }
    VectorXcd from_deformed_frame(const VectorXcd& v) const { return frame_ * v; }

    // Plain conjugation (the canonical involution fixing H_R), expressed in
    // the deformed frame:  conj_deformed(v) = frame^{-1} * conj(frame * v).
    VectorXcd conj_deformed(const VectorXcd& v) const { return conj_lin_ * v.conjugate(); }
    const MatrixXcd& conj_linear() const { return conj_lin_; }

    // Conjugation fixing the commutant subspace H_R' (deformed frame).
    VectorXcd conj_commutant(const VectorXcd& v) const;

    // Real-linear basis of (H_R^(j))' in the coordinate frame.
    const MatrixXcd& commutant_basis(int sector) const { return comm_basis_[sector]; }
    // Same vectors, deformed frame, all sectors side by side.
    const MatrixXcd& commutant_frame() const { return comm_frame_; }

    bool is_real_vector(const VectorXcd& v_coord, double tol = 1e-10) const;
    // Distance of v (deformed frame) from the real-linear span of H_R'.
    double commutant_distance(const VectorXcd& v_deformed) const;

private:
    ModelSpec spec_;
    int dim_ = 0;
    std::vector<int> offsets_;
    std::vector<int> sector_of_;
    double q_max_ = 0.0;

    MatrixXcd gram_;       // deformed Gram in coordinates
    MatrixXcd frame_;      // coordinate <- deformed frame
    MatrixXcd frame_inv_;  // deformed <- coordinate frame
    MatrixXcd conj_lin_;   // linear part of conjugation in the deformed frame

    std::vector<MatrixXcd> comm_basis_;  // per sector, coordinate frame
    MatrixXcd comm_frame_;               // global, deformed frame
    Eigen::FullPivLU<MatrixXd> comm_solver_;  // real/imag split against comm_frame_
};

Model build_model(const ModelSpec& spec);  // throws std::invalid_argument on bad specs

// <2(1+A^{-1})^{-1} xi, eta> for vectors in the coordinate frame.
cplx deformed_inner(const Model& m, const VectorXcd& xi, const VectorXcd& eta);

VectorXcd apply_Ut(const Model& m, double t, const VectorXcd& xi);

// A^{-1/2} xi for real xi; lands in H_R' sector by sector.
VectorXcd commutant_vector(const Model& m, const VectorXcd& xi);

// Real-linear basis of (H_R^(j))' = {xi : <xi, eta>_U real for all real eta},
// solved from the imaginary part of the deformed pairing.  Coordinate frame.
MatrixXcd commutant_subspace_basis(const Model& m, int sector);

}  // namespace tfock
