#include "dbarlab/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <thread>

#include "dbarlab/errors.hpp"
#include "dbarlab/summation.hpp"

namespace dbarlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Thresholds for the data prechecks.
constexpr double kClosedTol = 1e-8;
constexpr double kMomentTol = 1e-6;

using Vec = Eigen::VectorXcd;

double weighted_sq(const Vec& r, const std::vector<double>& s) {
    CompensatedSum acc;
    for (Eigen::Index i = 0; i < r.size(); ++i) acc.add(std::norm(r[i]) * s[i]);
    return acc.value();
}

std::string fmt_k(double k) {
    std::string s = std::to_string(k);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace

void SolveConfig::validate() const {
    if (!(tolerance > 0.0 && tolerance < 1.0)) throw ConfigError("solver.tolerance must lie in (0, 1)");
    if (max_iterations < 0) throw ConfigError("solver.max_iterations must be >= 1 (0 selects the default)");
    if (!(shift >= 0.0)) throw ConfigError("solver.shift must be non-negative");
    if (!(weight_floor >= 0.0)) throw ConfigError("solver.weight_floor must be non-negative");
    if (orthogonality_degree < 0) throw ConfigError("solver.orthogonality_degree must be non-negative");
    if (!(residual_weight_cap >= 0.0 && residual_weight_cap <= 600.0)) {
        throw ConfigError("solver.residual_weight_cap must lie in [0, 600]");
    }
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& f) {
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        f(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

SolveResult solve_min_norm(const FormField& omega, const DbarOperator& op, const WeightedMeasure& w_u,
                           const WeightedMeasure& w_d, const SolveConfig& cfg, const SolveDomain& domain) {
    cfg.validate();
    const Grid& grid = op.grid();
    if (!(omega.grid() == grid) || omega.degree() != op.target_degree()) {
        throw ShapeError("solve_min_norm: omega does not match the operator target");
    }
    if (!(w_u.grid() == grid) || !(w_d.grid() == grid)) throw ShapeError("solve_min_norm: measure grid differs");

    const std::size_t P = grid.points();
    const RegionMask unknowns = domain.unknowns.value_or(RegionMask::all(grid));
    const RegionMask rows = domain.rows.value_or(unknowns.stencil_closed());

    // Solution weight in log form, shifted so the smallest retained weight is 1.
    std::vector<double> lw(P, kNegInf);
    double lw_min = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < P; ++p) {
        if (!unknowns.contains(p)) continue;
        double l = w_u.log_weight(p);
        if (cfg.weight_floor > 0.0) l = std::max(l, std::log(cfg.weight_floor));
        if (!std::isfinite(l)) {
            throw ConfigError("solve_min_norm: solution weight w_u must be strictly positive on the grid "
                              "(degenerate weight; set solver.weight_floor for stress tests)");
        }
        lw[p] = l;
        lw_min = std::min(lw_min, l);
    }

    SolveResult res{FormField(grid, op.source_degree()), {}};
    SolveReport& rep = res.report;
    const int src_comp = form_components(grid.n(), op.source_degree());
    const int tgt_comp = omega.components();

    if (omega.is_zero()) {
        rep.converged = true;
        return res;
    }
    if (!omega.all_finite()) throw PreconditionError("solve_min_norm: omega has non-finite entries");

    rep.data_norm = weighted_norm(omega, w_d);
    if (!cfg.trust_data) {
        if (op.target_degree() < grid.n()) {
            const DbarOperator next(grid, op.target_degree() + 1);
            rep.precheck = weighted_norm(next.apply(omega), w_d) / rep.data_norm;
            if (!(rep.precheck <= kClosedTol)) {
                throw PreconditionError("solve_min_norm: omega is not dbar-closed (relative defect " +
                                        std::to_string(rep.precheck) + ")");
            }
        } else {
            rep.precheck = max_moment_defect(moment_orthogonality(omega, cfg.orthogonality_degree));
            if (!(rep.precheck <= kMomentTol)) {
                throw PreconditionError("solve_min_norm: omega fails the holomorphic moment test (defect " +
                                        std::to_string(rep.precheck) + ")");
            }
        }
        FormField dropped = omega;
        for (std::size_t p = 0; p < P; ++p) {
            if (!rows.contains(p)) continue;
            for (int c = 0; c < tgt_comp; ++c) dropped.at(c, p) = {};
        }
        const double off = weighted_norm(dropped, w_d) / rep.data_norm;
        if (off > kClosedTol) {
            throw PreconditionError("solve_min_norm: omega does not vanish off the constraint rows (relative mass " +
                                    std::to_string(off) + ")");
        }
    }

    // Compact numbering of unknowns and constraint rows.
    std::vector<long> col_id(static_cast<std::size_t>(src_comp) * P, -1);
    std::vector<double> winv;
    for (int c = 0; c < src_comp; ++c) {
        for (std::size_t p = 0; p < P; ++p) {
            if (!unknowns.contains(p)) continue;
            col_id[c * P + p] = static_cast<long>(winv.size());
            winv.push_back(std::exp(-(lw[p] - lw_min)));
        }
    }
    std::vector<std::size_t> row_ids;
    for (int c = 0; c < tgt_comp; ++c) {
        for (std::size_t p = 0; p < P; ++p) {
            if (rows.contains(p)) row_ids.push_back(c * P + p);
        }
    }
    const auto ncols = static_cast<Eigen::Index>(winv.size());
    const auto nrows = static_cast<Eigen::Index>(row_ids.size());
    rep.unknowns = winv.size();
    rep.constraints = row_ids.size();
    if (nrows == 0 || ncols == 0) throw PreconditionError("solve_min_norm: empty constraint set");

    std::vector<Eigen::Triplet<cplx>> trip;
    const SparseMatrix& full = op.matrix();
    for (Eigen::Index r = 0; r < nrows; ++r) {
        for (SparseMatrix::InnerIterator it(full, static_cast<Eigen::Index>(row_ids[r])); it; ++it) {
            const long c = col_id[it.col()];
            if (c >= 0) trip.emplace_back(r, c, it.value());
        }
    }
    SparseMatrix D(nrows, ncols);
    D.setFromTriplets(trip.begin(), trip.end());
    D.makeCompressed();
    const SparseMatrix DH = D.adjoint();
    const Eigen::Map<const Eigen::VectorXd> wv(winv.data(), ncols);

    Vec b(nrows);
    for (Eigen::Index r = 0; r < nrows; ++r) b[r] = omega.data()[row_ids[r]];

    // Residual scaling: e^{log w_d - M} with M the largest log weight on the
    // data rows, capped so huge weights far from the data cannot overflow.
    double m_d = kNegInf;
    for (Eigen::Index r = 0; r < nrows; ++r) {
        if (b[r] != cplx{}) m_d = std::max(m_d, w_d.log_weight(row_ids[r] % P));
    }
    std::vector<double> scale(nrows, 1.0);
    if (std::isfinite(m_d)) {
        for (Eigen::Index r = 0; r < nrows; ++r) {
            const double l = w_d.log_weight(row_ids[r] % P);
            scale[r] = l == kNegInf ? 0.0 : std::exp(std::min(l - m_d, cfg.residual_weight_cap));
        }
    }
    const double bnorm2 = weighted_sq(b, scale);
    if (!(bnorm2 > 0.0)) throw PreconditionError("solve_min_norm: data vanishes in the w_d norm");

    // Jacobi preconditioner diag(D W^{-1} D^H) + mu.
    Vec minv(nrows);
    for (Eigen::Index r = 0; r < nrows; ++r) {
        double d = cfg.shift;
        for (SparseMatrix::InnerIterator it(D, r); it; ++it) d += std::norm(it.value()) * winv[it.col()];
        minv[r] = d > 1e-300 ? 1.0 / d : 0.0;
    }

    const long max_it = cfg.max_iterations > 0
                            ? cfg.max_iterations
                            : std::max<long>(1, static_cast<long>(20.0 * std::sqrt(static_cast<double>(ncols))));

    Vec r = b;
    Vec z = minv.cwiseProduct(r);
    Vec p = z;
    Vec u = Vec::Zero(ncols);
    Vec best_u = u;
    Vec sp(ncols), ap(nrows), t(nrows);
    double rz = r.dot(z).real();
    double best = 1.0;
    long best_it = 0;
    long it = 0;
    bool hit = false;
    while (it < max_it) {
        ++it;
        sp.noalias() = DH * p;
        sp.array() *= wv.array();
        ap.noalias() = D * sp;
        if (cfg.shift > 0.0) ap += cfg.shift * p;
        const double pap = p.dot(ap).real();
        if (!(pap > 0.0)) break;
        const double alpha = rz / pap;
        u += alpha * sp;
        r -= alpha * ap;

        t.noalias() = D * u;
        t = b - t;
        const double rel = std::sqrt(weighted_sq(t, scale) / bnorm2);
        rep.residual_history.push_back(rel);
        if (cfg.verbosity > 1 && it % 100 == 0) std::cerr << "  cg " << it << " residual " << rel << '\n';
        if (rel < best) {
            best = rel;
            best_u = u;
            best_it = it;
        }
        if (rel <= cfg.tolerance) {
            hit = true;
            break;
        }
        // The capped-weight residual is far from monotone, so only a long run
        // without a new best (or a non-finite value) ends the iteration early.
        // Before the first improvement on u = 0 the run goes to max_it.
        if (!std::isfinite(rel) || (best_it > 0 && it - best_it > std::max<long>(500, it / 2))) break;

        z = minv.cwiseProduct(r);
        const double rz_new = r.dot(z).real();
        const double beta = rz_new / rz;
        rz = rz_new;
        p = z + beta * p;
    }
    rep.iterations = it;
    rep.residual = best;
    rep.converged = hit;
    if (!hit && !cfg.allow_inexact) {
        throw SolverError("solve_min_norm: CG did not reach tolerance " + std::to_string(cfg.tolerance) +
                              " within " + std::to_string(it) + " iterations (best residual " +
                              std::to_string(best) + ")",
                          rep.residual_history);
    }

    for (std::size_t i = 0; i < col_id.size(); ++i) {
        if (col_id[i] >= 0) res.u.data()[i] = best_u[col_id[i]];
    }
    rep.u_norm = weighted_norm(res.u, w_u);
    rep.ratio = rep.data_norm > 0.0 ? rep.u_norm / rep.data_norm : 0.0;
    if (cfg.verbosity > 0) {
        std::cerr << "solve_min_norm: " << it << " iterations, residual " << best << ", ratio " << rep.ratio << '\n';
    }
    return res;
}

std::vector<BumpedMember> solve_bumped_family(const FormField& omega, const DefiningFunction& domain, double eps,
                                              const std::vector<double>& ks, const WeightSpec& phi,
                                              const SolveConfig& cfg, int threads, const ConvexCutoff& cutoff) {
    const Grid& grid = omega.grid();
    if (!(eps > 0.0)) throw ConfigError("bumped family: eps must be positive");
    if (phi.n() != grid.n() || domain.n != grid.n()) throw ShapeError("bumped family: dimension mismatch");
    for (double k : ks) {
        if (!(k >= 0.0)) throw ConfigError("bumped family: k values must be non-negative");
    }
    for (std::size_t p = 0; p < grid.points(); ++p) {
        if (domain(grid.z(p)) < 0.0) continue;
        for (int c = 0; c < omega.components(); ++c) {
            if (omega.at(c, p) != cplx{}) {
                throw PreconditionError("bumped family: omega is not supported inside D");
            }
        }
    }

    const DbarOperator op(grid, omega.degree());
    const RegionMask outside = RegionMask::sublevel(grid, domain, eps).complement();
    const WeightedMeasure tail_measure = c_exp_weight(grid, phi);

    std::vector<std::optional<BumpedMember>> slots(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t i) {
        const BumpedWeight bw{phi, domain, cutoff, ks[i]};
        try {
            SolveResult s = solve_min_norm(omega, op, c_exp_bumped(grid, bw), exp_bumped(grid, bw), cfg);
            s.report.k = ks[i];
            BumpedMember m{ks[i], std::move(s.u), std::move(s.report), 0.0, 0.0};
            m.tail = tail_mass(m.u, outside, tail_measure);
            m.mass = tail_mass(m.u, RegionMask::all(grid), tail_measure);
            slots[i] = std::move(m);
        } catch (const SolverError& e) {
            throw SolverError(std::string("bumped family: solve failed at k=") + fmt_k(ks[i]) + ": " + e.what(),
                              e.residual_history(), "k=" + fmt_k(ks[i]));
        }
    });
    std::vector<BumpedMember> out;
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

ConstantEstimate estimate_constant(const std::vector<ConstantCase>& cases, const SolveConfig& cfg, int threads) {
    if (cases.empty()) throw ConfigError("estimate_constant: need at least one test case");
    std::vector<SolveReport> reports(cases.size());
    parallel_for(cases.size(), threads, [&](std::size_t i) {
        const ConstantCase& c = cases[i];
        const DbarOperator op(c.omega.grid(), c.omega.degree());
        reports[i] = solve_min_norm(c.omega, op, c.w_u, c.w_d, cfg).report;
    });
    ConstantEstimate est;
    for (const SolveReport& r : reports) est.c_hat = std::max(est.c_hat, r.ratio);
    est.reports = std::move(reports);
    return est;
}

}  // namespace dbarlab
