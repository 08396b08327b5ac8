#include "tfock/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tfock/modular.hpp"
#include "tfock/probability.hpp"
#include "tfock/rng.hpp"

namespace tfock {
namespace {

// Everything a suite may read; all of it is immutable while the suites run.
struct SuiteCtx {
    const RunConfig* cfg = nullptr;
    const Model* m = nullptr;
    const WordBasis* b = nullptr;
    const TwistKernel* k = nullptr;
    const WickTable* table = nullptr;
    const ModularData* md = nullptr;  // null when the modular build failed
    std::string md_error;
    double scale = 1.0;  // multiplies every tolerance below
};

ResidualRow row_le(std::string check, double value, double tol) {
    return ResidualRow{std::move(check), value, tol, value <= tol};
}

ResidualRow row_gt(std::string check, double value, double tol) {
    return ResidualRow{std::move(check), value, tol, value > tol};
}

ResidualRow row_diag(std::string check, double value) {
    return ResidualRow{std::move(check), value, 0.0, true};
}

// Placeholder for suites that depend on a construction that threw.
ResidualRow row_build_error(const std::string& why) {
    return ResidualRow{"build_error[" + why + "]", 1e99, 0.0, false};
}

VectorXcd random_real_coord(const Model& m, Rng& rng) {
    return rng.real_vector(m.dim()).cast<cplx>();
}

// Random element of the real-linear span of the commutant basis vectors,
// coordinate frame.
VectorXcd random_commutant_coord(const Model& m, Rng& rng) {
    VectorXcd out = VectorXcd::Zero(m.dim());
    for (int s = 0; s < m.sector_count(); ++s) {
        const MatrixXcd& basis = m.commutant_basis(s);
        for (Eigen::Index c = 0; c < basis.cols(); ++c) out += cplx(rng.normal(), 0.0) * basis.col(c);
    }
    return out;
}

WickLetter random_letter(const Model& m, Rng& rng, int sector) {
    WickLetter l;
    l.sector = sector;
    l.vec = VectorXcd::Zero(m.dim());
    const int off = m.sector_offset(sector);
    for (int i = 0; i < m.sector_dim(sector); ++i) l.vec(off + i) = rng.cnormal();
    return l;
}

WickWord random_word(const Model& m, Rng& rng, int len, const std::vector<int>& sectors) {
    WickWord w;
    for (int i = 0; i < len; ++i) {
        const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(sectors.size()) - 1);
        w.letters.push_back(random_letter(m, rng, sectors[static_cast<std::size_t>(pick)]));
    }
    return w;
}

std::vector<int> all_sectors(const Model& m) {
    std::vector<int> out(m.sector_count());
    for (int s = 0; s < m.sector_count(); ++s) out[s] = s;
    return out;
}

// Tensor product of the letters as a level-(length) Fock vector, first
// letter most significant.
FockVector word_vector(const WordBasis& b, const WickWord& w) {
    FockVector v = FockVector::zero(b);
    VectorXcd col = VectorXcd::Ones(1);
    for (const WickLetter& l : w.letters) {
        VectorXcd next(col.size() * l.vec.size());
        for (Eigen::Index i = 0; i < col.size(); ++i)
            next.segment(i * l.vec.size(), l.vec.size()) = col(i) * l.vec;
        col.swap(next);
    }
    v.lev[w.length()] = col;
    return v;
}

double rel(double num, double den) { return num / std::max(den, 1e-300); }

// ---------------------------------------------------------------- suites --

SuiteResult suite_positivity(const SuiteCtx& c) {
    SuiteResult s;
    const double floor = 1e-10 * c.scale;
    const PositivityReport rep = check_positivity(*c.m, *c.k, floor);
    for (std::size_t n = 0; n < rep.min_eig.size(); ++n)
        s.rows.push_back(row_gt("min_eig_level_" + std::to_string(n), rep.min_eig[n], floor));
    return s;
}

SuiteResult suite_yang_baxter(const SuiteCtx& c) {
    SuiteResult s;
    double residual = 0.0;
    if (c.cfg->corrupt_twist) {
        // Negative control: an asymmetric rescaling of T (x) 1 breaks the
        // braid identity whenever the twist words are nonzero.
        const MatrixXcd t1 = 1.001 * extend_twist(*c.m, 1, 3);
        const MatrixXcd t2 = extend_twist(*c.m, 2, 3);
        residual = spectral_norm(t1 * t2 * t1 - t2 * t1 * t2);
    } else {
        residual = check_yang_baxter(*c.m);
    }
    s.rows.push_back(row_le("braid_residual", residual, 1e-13 * c.scale));
    s.rows.push_back(row_diag("diag_ladder_vs_group_sum", c.k->verify_residual()));
    return s;
}

SuiteResult suite_adjointness(const SuiteCtx& c) {
    SuiteResult s;
    Rng rng(c.cfg->seed + 1);
    const WordBasis& b = *c.b;
    const int max_src = b.levels() - 1;  // keep the top-level eigenproblem out of the loop
    const double bound_base = 1.0 / std::sqrt(1.0 - c.m->q_max());
    double worst_left = 0.0, worst_right = 0.0, worst_margin = -1e300;
    for (int trial = 0; trial < 100; ++trial) {
        const VectorXcd u = rng.complex_vector(b.dim());
        const FockOperator lc = left_create(b, u);
        worst_left = std::max(worst_left, op_norm_T(*c.k, adjoint_T(*c.k, lc) - left_annihilate(b, u), max_src));
        worst_right = std::max(
            worst_right, op_norm_T(*c.k, adjoint_T(*c.k, right_create(b, u)) - right_annihilate(b, u), max_src));
        worst_margin = std::max(worst_margin, op_norm_T(*c.k, lc, max_src) - u.norm() * bound_base);
    }
    double worst_field = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const FockOperator f = field_s(*c.m, b, random_real_coord(*c.m, rng));
        worst_field = std::max(worst_field, op_norm_T(*c.k, adjoint_T(*c.k, f) - f, max_src));
    }
    s.rows.push_back(row_le("create_adjoint_residual", worst_left, 1e-10 * c.scale));
    s.rows.push_back(row_le("right_create_adjoint_residual", worst_right, 1e-10 * c.scale));
    s.rows.push_back(row_le("field_self_adjoint_residual", worst_field, 1e-10 * c.scale));
    s.rows.push_back(row_le("create_norm_margin", worst_margin, 1e-10 * c.scale));
    return s;
}

SuiteResult suite_wick_vacuum(const SuiteCtx& c) {
    SuiteResult s;
    Rng rng(c.cfg->seed + 2);
    const std::vector<int> secs = all_sectors(*c.m);
    const int max_len = std::min(3, c.b->levels());
    double worst_l = 0.0, worst_r = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const int len = 1 + static_cast<int>(rng.uniform_int(0, max_len - 1));
        const WickWord w = random_word(*c.m, rng, len, secs);
        const FockVector target = word_vector(*c.b, w);
        const double den = c.k->norm_T(target);
        FockVector dl = apply_wick_s(*c.m, *c.b, w, FockVector::vacuum(*c.b));
        dl *= -1.0;
        dl += target;
        worst_l = std::max(worst_l, rel(c.k->norm_T(dl), den));
        FockVector dr = apply_wick_d(*c.m, *c.b, w, FockVector::vacuum(*c.b));
        dr *= -1.0;
        dr += target;
        worst_r = std::max(worst_r, rel(c.k->norm_T(dr), den));
    }
    s.rows.push_back(row_le("left_wick_vacuum_residual", worst_l, 1e-10 * c.scale));
    s.rows.push_back(row_le("right_wick_vacuum_residual", worst_r, 1e-10 * c.scale));
    return s;
}

SuiteResult suite_commutant_relation(const SuiteCtx& c) {
    SuiteResult s;
    Rng rng(c.cfg->seed + 3);
    const Model& m = *c.m;
    double worst_comm = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        VectorXcd xi = random_real_coord(m, rng);
        xi /= xi.norm();
        VectorXcd eta = random_commutant_coord(m, rng);
        eta /= eta.norm();
        const FockOperator x = field_s(m, *c.b, xi);
        const FockOperator y = field_d(m, *c.b, eta);
        worst_comm = std::max(worst_comm, op_norm_T(*c.k, x * y - y * x, c.b->levels() - 2));
    }
    s.rows.push_back(row_le("field_commutator_norm", worst_comm, 1e-10 * c.scale));
    if (c.md == nullptr) {
        s.rows.push_back(row_build_error(c.md_error));
        return s;
    }
    const ModularData& md = *c.md;
    double worst_jsj = 0.0;
    for (int trial = 0; trial < 10; ++trial)
        worst_jsj = std::max(worst_jsj, check_commutant_relation(m, *c.b, *c.k, md, random_real_coord(m, rng)));
    s.rows.push_back(row_le("jsj_vs_right_field", worst_jsj, 1e-8 * c.scale));
    if (md.top >= 2) {
        double worst_jc = 0.0;
        for (int trial = 0; trial < 6; ++trial) {
            VectorXcd xi = random_real_coord(m, rng);
            xi /= xi.norm();
            VectorXcd eta = random_real_coord(m, rng);
            eta /= eta.norm();
            const FockOperator z = conjugate_by_modular_J(*c.b, md, field_s(m, *c.b, xi));
            const FockOperator w = field_s(m, *c.b, eta);
            worst_jc = std::max(worst_jc, op_norm_T(*c.k, z * w - w * z, md.top - 2));
        }
        s.rows.push_back(row_le("jsj_commutes_with_fields", worst_jc, 1e-8 * c.scale));
    }
    return s;
}

SuiteResult suite_modular_flow(const SuiteCtx& c) {
    SuiteResult s;
    if (c.md == nullptr) {
        s.rows.push_back(row_build_error(c.md_error));
        return s;
    }
    const ModularData& md = *c.md;
    Rng rng(c.cfg->seed + 4);
    const Model& m = *c.m;
    for (const double t : {0.3, -0.3, 1.0, -1.0}) {
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            VectorXcd xi = random_real_coord(m, rng);
            xi /= xi.norm();
            worst = std::max(worst, modular_flow_residual(m, *c.b, *c.k, md, t, xi));
        }
        char name[64];
        std::snprintf(name, sizeof(name), "flow_residual_t_%+.1f", t);
        s.rows.push_back(row_le(name, worst, 1e-8 * c.scale));
    }
    double worst_unitary = 0.0;
    for (int n = 0; n <= md.top; ++n) {
        const MatrixXcd u = md.delta_unitary(n, 0.7);
        worst_unitary =
            std::max(worst_unitary, rel(spectral_norm(u.adjoint() * c.k->p(n) * u - c.k->p(n)),
                                        spectral_norm(c.k->p(n))));
    }
    s.rows.push_back(row_le("delta_unitary_residual", worst_unitary, 1e-9 * c.scale));
    s.rows.push_back(row_le("vacuum_fixed_delta", std::abs(md.delta_unitary(0, 0.9)(0, 0) - 1.0), 1e-12 * c.scale));
    s.rows.push_back(row_le("vacuum_fixed_j", std::abs(md.j_lin[0](0, 0) - 1.0), 1e-12 * c.scale));
    s.rows.push_back(row_le("polar_residual", md.polar_residual, 1e-9 * c.scale));
    s.rows.push_back(row_le("s_square_residual", md.s_square_residual, 1e-9 * c.scale));
    s.rows.push_back(row_le("j_square_residual", md.j_square_residual, 1e-9 * c.scale));
    if (m.spec().blocks.empty()) {
        // Trivial flow: the vacuum state is a trace and Delta collapses.
        double worst_id = 0.0;
        for (int n = 0; n <= md.top; ++n)
            worst_id = std::max(
                worst_id, spectral_norm(md.delta[n] - MatrixXcd::Identity(c.b->size(n), c.b->size(n))));
        s.rows.push_back(row_le("delta_identity_residual", worst_id, 1e-12 * c.scale));
    }
    s.rows.push_back(row_diag("diag_word_reversal", md.reversal_residual));
    s.rows.push_back(row_diag("diag_delta_tensor_power", md.tensor_candidate_residual));
    s.rows.push_back(row_diag("diag_off_level_mass", md.off_level_mass));
    return s;
}

void expectation_rows_for(const SuiteCtx& c, const std::vector<int>& sectors, Rng& rng, SuiteResult& s) {
    const Model& m = *c.m;
    const WordBasis& b = *c.b;
    std::string prefix = "D";
    for (int sec : sectors) prefix += std::to_string(sec);
    prefix += "_";

    const ExpectationData ed = build_expectation(m, b, *c.k, *c.table, sectors);
    const std::vector<int> all = all_sectors(m);
    std::vector<int> complement;
    for (int sec : all)
        if (!std::binary_search(sectors.begin(), sectors.end(), sec)) complement.push_back(sec);

    const int word_len = std::min(3, ed.top);
    if (word_len >= 1) {
        double worst_phi = 0.0, worst_idem = 0.0, worst_fixed = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const int len = 1 + static_cast<int>(rng.uniform_int(0, word_len - 1));
            const FockOperator x = wick_s(m, b, random_word(m, rng, len, all));
            const FockOperator ex = conditional_expectation(b, ed, x);
            worst_phi = std::max(worst_phi, std::abs(vacuum_state(b, ex) - vacuum_state(b, x)));
            if (trial < 12) {
                const FockOperator exx = conditional_expectation(b, ed, ex);
                worst_idem = std::max(worst_idem, rel(op_norm_T(*c.k, exx - ex, -1),
                                                      std::max(1.0, op_norm_T(*c.k, ex, -1))));
                const FockOperator xd = wick_s(m, b, random_word(m, rng, len, sectors));
                worst_fixed = std::max(worst_fixed, rel(op_norm_T(*c.k, conditional_expectation(b, ed, xd) - xd, -1),
                                                        std::max(1.0, op_norm_T(*c.k, xd, -1))));
            }
        }
        s.rows.push_back(row_le(prefix + "phi_preserving", worst_phi, 1e-10 * c.scale));
        s.rows.push_back(row_le(prefix + "idempotent", worst_idem, 1e-9 * c.scale));
        s.rows.push_back(row_le(prefix + "fixed_on_subalgebra_words", worst_fixed, 1e-10 * c.scale));
    }
    if (ed.top >= 3) {
        // E(a x b) = a E(x) b for a, b in the sub algebra; compare on the source
        // levels where the three-factor product is free of truncation effects.
        double worst_mod = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const FockOperator a = wick_s(m, b, random_word(m, rng, 1, sectors));
            const FockOperator x = wick_s(m, b, random_word(m, rng, 1, all));
            const FockOperator bb = wick_s(m, b, random_word(m, rng, 1, sectors));
            const FockOperator lhs = conditional_expectation(b, ed, a * x * bb);
            const FockOperator rhs = a * conditional_expectation(b, ed, x) * bb;
            const int max_src = b.levels() - 3;
            worst_mod = std::max(
                worst_mod, rel(op_norm_T(*c.k, lhs - rhs, max_src), std::max(1.0, op_norm_T(*c.k, rhs, max_src))));
        }
        s.rows.push_back(row_le(prefix + "module_property", worst_mod, 1e-9 * c.scale));
    }
    if (!complement.empty()) {
        double worst_kill = 0.0;
        for (int trial = 0; trial < 6; ++trial) {
            VectorXcd xi = VectorXcd::Zero(m.dim());
            for (int sec : complement)
                for (int i = 0; i < m.sector_dim(sec); ++i) xi(m.sector_offset(sec) + i) = rng.normal();
            worst_kill = std::max(
                worst_kill, op_norm_T(*c.k, conditional_expectation(b, ed, field_s(m, b, xi)), -1) /
                                std::max(1.0, xi.norm()));
        }
        s.rows.push_back(row_le(prefix + "kills_complement_fields", worst_kill, 1e-10 * c.scale));
    }
    s.rows.push_back(row_le(prefix + "perp_subspace_angle", ed.perp_angle_max, 1e-9 * c.scale));
    s.rows.push_back(row_le(prefix + "flow_invariance", ed.invariance_residual, 1e-10 * c.scale));
}

SuiteResult suite_expectation(const SuiteCtx& c) {
    SuiteResult s;
    Rng rng(c.cfg->seed + 5);
    const int nsec = c.m->sector_count();
    for (unsigned mask = 1; mask < (1u << nsec); ++mask) {
        std::vector<int> sectors;
        for (int sec = 0; sec < nsec; ++sec)
            if (mask & (1u << sec)) sectors.push_back(sec);
        expectation_rows_for(c, sectors, rng, s);
    }
    return s;
}

SuiteResult suite_moment_oracle(const SuiteCtx& c) {
    SuiteResult s;
    const Model& m = *c.m;
    const int kmax = std::min(8, 2 * (c.b->levels() - 1));
    std::vector<std::future<double>> futs;
    for (int ord = 1; ord <= kmax; ++ord) {
        futs.push_back(std::async(std::launch::async, [&, ord] {
            double worst = 0.0;
            std::vector<int> tuple(ord, 0);
            for (;;) {
                const MomentQuery q = basis_query(m, tuple);
                worst = std::max(worst,
                                 std::abs(vacuum_moment(m, *c.b, *c.k, q) - pair_partition_moment(m, q)));
                int pos = ord - 1;
                while (pos >= 0 && ++tuple[pos] == m.dim()) tuple[pos--] = 0;
                if (pos < 0) break;
            }
            return worst;
        }));
    }
    for (int ord = 1; ord <= kmax; ++ord)
        s.rows.push_back(
            row_le("order_" + std::to_string(ord) + "_max_discrepancy", futs[ord - 1].get(), 1e-10 * c.scale));
    s.rows.push_back(
        row_le("state_of_identity", std::abs(vacuum_state(*c.b, identity_op(*c.b)) - 1.0), 1e-14 * c.scale));
    return s;
}

SuiteResult run_timed(const SuiteCtx& ctx, const char* name, SuiteResult (*fn)(const SuiteCtx&)) {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult out;
    try {
        out = fn(ctx);
    } catch (const std::exception& e) {
        out.rows.push_back(row_build_error(e.what()));
    }
    out.name = name;
    out.finish();
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace

CheckOutcome run_check(const RunConfig& cfg) {
    const std::vector<std::string> violations = validate_spec(cfg.spec);
    if (!violations.empty()) {
        std::string msg = "invalid model spec:";
        for (const std::string& v : violations) msg += "\n  - " + v;
        throw std::invalid_argument(msg);
    }
    if (cfg.spec.level < 2) throw std::invalid_argument("check needs a truncation level of at least 2");

    const Model m = build_model(cfg.spec);
    const TwistKernel k = build_kernel(m, -1, true);
    const WordBasis& b = k.basis();
    const WickTable table(m, b, std::max(0, m.level() - 2));

    SuiteCtx ctx;
    ctx.cfg = &cfg;
    ctx.m = &m;
    ctx.b = &b;
    ctx.k = &k;
    ctx.table = &table;
    ctx.scale = cfg.tol_scale;

    ModularData md;
    try {
        md = build_modular(m, b, k, table);
        ctx.md = &md;
    } catch (const std::exception& e) {
        ctx.md_error = e.what();
    }

    const std::pair<const char*, SuiteResult (*)(const SuiteCtx&)> plan[] = {
        {"positivity", suite_positivity},
        {"yang_baxter", suite_yang_baxter},
        {"adjointness", suite_adjointness},
        {"wick_vacuum", suite_wick_vacuum},
        {"commutant_relation", suite_commutant_relation},
        {"modular_flow", suite_modular_flow},
        {"expectation", suite_expectation},
        {"moment_oracle", suite_moment_oracle},
    };
    std::vector<std::future<SuiteResult>> futs;
    for (const auto& [name, fn] : plan)
        futs.push_back(std::async(std::launch::async, run_timed, std::cref(ctx), name, fn));

    CheckOutcome out;
    out.report.model = model_spec_to_json(cfg.spec);
    out.report.model["dim"] = m.dim();
    for (auto& f : futs) out.report.suites.push_back(f.get());
    out.report.finish();
    out.exit_code = out.report.pass ? 0 : 1;
    return out;
}

std::string moments_csv(const ModelSpec& spec, int max_order) {
    const std::vector<std::string> violations = validate_spec(spec);
    if (!violations.empty()) throw std::invalid_argument("invalid model spec: " + violations.front());
    if (max_order < 1) throw std::invalid_argument("max order must be at least 1");
    if (max_order > spec.level - 1)
        throw std::invalid_argument("order overflow: max order " + std::to_string(max_order) +
                                    " exceeds level - 1 = " + std::to_string(spec.level - 1));

    const Model m = build_model(spec);
    const TwistKernel k = build_kernel(m, -1, false);
    const WordBasis& b = k.basis();

    std::string out = "order,letters,matrix_re,matrix_im,oracle_re,oracle_im,abs_discrepancy\n";
    for (int ord = 1; ord <= max_order; ++ord) {
        std::vector<int> tuple(ord, 0);
        for (;;) {
            const MomentQuery q = basis_query(m, tuple);
            const cplx mat = vacuum_moment(m, b, k, q);
            const cplx ora = pair_partition_moment(m, q);
            out += std::to_string(ord) + ",";
            for (int i = 0; i < ord; ++i) out += (i ? "." : "") + std::to_string(tuple[i]);
            out += "," + format_g17(mat.real()) + "," + format_g17(mat.imag());
            out += "," + format_g17(ora.real()) + "," + format_g17(ora.imag());
            out += "," + format_g17(std::abs(mat - ora)) + "\n";
            int pos = ord - 1;
            while (pos >= 0 && ++tuple[pos] == m.dim()) tuple[pos--] = 0;
            if (pos < 0) break;
        }
    }
    return out;
}

std::string scan_csv(const ModelSpec& spec, const std::vector<double>& q_grid) {
    for (const double g : q_grid)
        if (!(std::abs(g) < 1.0))
            throw std::invalid_argument("grid value " + format_g17(g) + " is outside (-1, 1)");

    std::vector<std::future<std::string>> futs;
    for (const double g : q_grid) {
        futs.push_back(std::async(std::launch::async, [&spec, g] {
            ModelSpec sp = spec;
            sp.q.setConstant(g);
            const Model m = build_model(sp);
            const TwistKernel k = build_kernel(m, -1, false);
            const PositivityReport rep = check_positivity(m, k);
            std::string rows;
            for (std::size_t n = 0; n < rep.min_eig.size(); ++n)
                rows += format_g17(g) + "," + std::to_string(n) + "," + format_g17(rep.min_eig[n]) + "\n";
            return rows;
        }));
    }
    std::string out = "q,level,min_eigenvalue\n";
    for (auto& f : futs) out += f.get();
    return out;
}

}  // namespace tfock
