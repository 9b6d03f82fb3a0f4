#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "hessex/errors.hpp"
#include "hessex/format.hpp"
#include "hessex/parallel.hpp"
#include "hessex/roots.hpp"
#include "hessex/solver.hpp"

namespace hessex {

namespace {

constexpr std::size_t kNone = SIZE_MAX;
constexpr double kOnBoundary = 1e-12;
constexpr double kThetaFloor = 1e-8;
constexpr std::array<std::array<std::size_t, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

/// tau in (0, 1] with level(x + tau d) = 1, x outside and x + d inside
double crossing(const DomainSpec& domain, const std::array<double, 3>& x, const std::array<double, 3>& d) {
    const auto& c = domain.center();
    const auto& r = domain.semi_axes();
    double A = 0.0, B = 0.0, C = -1.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double p = (x[i] - c[i]) / r[i], q = d[i] / r[i];
        A += q * q;
        B += 2.0 * p * q;
        C += p * p;
    }
    const double disc = std::max(0.0, B * B - 4.0 * A * C);
    const double tau = 2.0 * C / (-B + std::sqrt(disc));
    return std::clamp(tau, kThetaFloor, 1.0);
}

}  // namespace

CartesianGrid::CartesianGrid(const DomainSpec& domain, std::size_t points, double half_width)
    : domain_(domain), m_(points), L_(half_width) {
    if (domain.dimension() != 3) throw ArgumentError("CartesianGrid: only n = 3 is supported");
    if (points < 5) throw ArgumentError("CartesianGrid: need at least 5 points per axis");
    if (!(half_width > 0.0)) throw ArgumentError("CartesianGrid: half_width must be positive");
    h_ = 2.0 * L_ / static_cast<double>(m_ - 1);
    const std::size_t total = m_ * m_ * m_;
    kind_.assign(total, Node::Unknown);
    slot_.assign(total, kNone);
    for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < m_; ++j)
            for (std::size_t k = 0; k < m_; ++k) {
                const std::size_t id = index(i, j, k);
                const bool face = i == 0 || j == 0 || k == 0 || i + 1 == m_ || j + 1 == m_ || k + 1 == m_;
                const auto x = position(id);
                const double lv = domain_.level(x);
                if (face) {
                    if (lv <= 1.0) throw ArgumentError("CartesianGrid: box must enclose the closed domain");
                    kind_[id] = Node::Dirichlet;
                } else if (std::abs(lv - 1.0) <= kOnBoundary) {
                    kind_[id] = Node::Dirichlet;
                } else if (lv < 1.0) {
                    kind_[id] = Node::Inside;
                }
            }
    for (std::size_t id = 0; id < total; ++id) {
        if (kind_[id] != Node::Unknown) continue;
        slot_[id] = unknowns_.size();
        unknowns_.push_back(id);
    }

    const std::array<std::size_t, 3> stride{m_ * m_, m_, 1};
    const auto& phi = domain_.phi();
    stencils_.resize(unknowns_.size());
    for (std::size_t q = 0; q < unknowns_.size(); ++q) {
        const std::size_t id = unknowns_[q];
        const auto x = position(id);
        Stencil& st = stencils_[q];
        bool cut = false;
        for (std::size_t a = 0; a < 3; ++a) {
            for (int sign : {1, -1}) {
                Arm& arm = sign > 0 ? st.plus[a] : st.minus[a];
                const std::size_t nb = sign > 0 ? id + stride[a] : id - stride[a];
                if (kind_[nb] != Node::Inside) {
                    arm.neighbour = nb;
                    continue;
                }
                std::array<double, 3> d{};
                d[a] = sign * h_;
                arm.theta = crossing(domain_, x, d);
                std::array<double, 3> xc = x;
                xc[a] += arm.theta * d[a];
                arm.boundary_value = phi.value(xc);
                cut = true;
            }
        }
        const auto outside = [&](std::size_t node) { return kind_[node] != Node::Inside; };
        for (std::size_t p = 0; p < 3; ++p) {
            const auto [a, b] = kPairs[p];
            const bool central = outside(id + stride[a] + stride[b]) && outside(id + stride[a] - stride[b]) &&
                                 outside(id - stride[a] + stride[b]) && outside(id - stride[a] - stride[b]);
            if (central) continue;
            cut = true;
            // prefer the quadrant facing away from the center
            const int pa = x[a] >= domain_.center()[a] ? 1 : -1, pb = x[b] >= domain_.center()[b] ? 1 : -1;
            const std::array<std::array<int, 2>, 4> order{{{pa, pb}, {pa, -pb}, {-pa, pb}, {-pa, -pb}}};
            bool found = false;
            for (const auto& sg : order) {
                const std::size_t na = sg[0] > 0 ? id + stride[a] : id - stride[a];
                const std::size_t nb2 = sg[1] > 0 ? id + stride[b] : id - stride[b];
                const std::size_t nab = sg[1] > 0 ? na + stride[b] : na - stride[b];
                if (outside(na) && outside(nb2) && outside(nab)) {
                    st.quadrant[p] = sg;
                    found = true;
                    break;
                }
            }
            if (!found) {
                st.fallback[p] = true;
                ++fallbacks_;
            }
        }
        st.isotropic = !cut;
        if (cut) ++cut_;
    }
}

std::array<double, 3> CartesianGrid::position(std::size_t node) const {
    const std::size_t i = node / (m_ * m_), j = (node / m_) % m_, k = node % m_;
    return {-L_ + h_ * static_cast<double>(i), -L_ + h_ * static_cast<double>(j), -L_ + h_ * static_cast<double>(k)};
}

const CartesianGrid::Stencil& CartesianGrid::stencil(std::size_t node) const {
    if (node >= slot_.size() || slot_[node] == kNone) throw ArgumentError("CartesianGrid: node is not an unknown");
    return stencils_[slot_[node]];
}

AffineHessian assemble_affine_hessian(const CartesianGrid& grid, const std::vector<double>& u, std::size_t node) {
    const auto& st = grid.stencil(node);
    const double h = grid.spacing(), h2 = h * h;
    const std::size_t m = grid.points();
    const std::array<std::size_t, 3> stride{m * m, m, 1};
    AffineHessian out{SymMatrix(3), SymMatrix(3)};
    for (std::size_t a = 0; a < 3; ++a) {
        const auto& p = st.plus[a];
        const auto& q = st.minus[a];
        const double up = p.neighbour == kNone ? p.boundary_value : u[p.neighbour];
        const double um = q.neighbour == kNone ? q.boundary_value : u[q.neighbour];
        out.m0(a, a) = 2.0 / ((p.theta + q.theta) * h2) * (up / p.theta + um / q.theta);
        out.c(a, a) = 2.0 / (p.theta * q.theta * h2);
    }
    const auto value = [&](std::size_t id) {
        if (grid.kind(id) == CartesianGrid::Node::Inside) return grid.domain().phi().value(grid.position(id));
        return u[id];
    };
    for (std::size_t k = 0; k < 3; ++k) {
        const auto [a, b] = kPairs[k];
        const auto& sg = st.quadrant[k];
        if (sg[0] == 0) {
            const double upp = value(node + stride[a] + stride[b]), upm = value(node + stride[a] - stride[b]);
            const double ump = value(node - stride[a] + stride[b]), umm = value(node - stride[a] - stride[b]);
            out.m0(a, b) = (upp - upm - ump + umm) / (4.0 * h2);
            continue;
        }
        const std::size_t na = sg[0] > 0 ? node + stride[a] : node - stride[a];
        const std::size_t nb = sg[1] > 0 ? node + stride[b] : node - stride[b];
        const std::size_t nab = sg[1] > 0 ? na + stride[b] : na - stride[b];
        const double sgn = static_cast<double>(sg[0] * sg[1]);
        out.m0(a, b) = sgn * (u[nab] - u[na] - u[nb]) / h2;
        out.c(a, b) = -sgn / h2;
    }
    return out;
}

SymMatrix assemble_hessian_fd(const CartesianGrid& grid, const std::vector<double>& u, std::size_t node) {
    auto ah = assemble_affine_hessian(grid, u, node);
    ah.c *= -u[node];
    return ah.m0 + ah.c;
}

namespace {

/// Scalar equation F(u0) = f(lambda(M0 - u0 C)) - g at one node; nullopt outside the cone.
struct LocalProblem {
    const SymmetricOperator& op;
    AffineHessian ah;
    double g;
    bool isotropic;
    std::vector<double> lambda0;  // isotropic only
    mutable std::vector<double> lam;

    std::optional<double> residual(double u0) const {
        if (isotropic) {
            const double shift = u0 * ah.c(0, 0);
            for (std::size_t i = 0; i < 3; ++i) lam[i] = lambda0[i] - shift;
        } else {
            SymMatrix H = ah.c;
            H *= -u0;
            lam = eigenvalues_ascending(ah.m0 + H);
        }
        if (!op.admissible(lam)) return std::nullopt;
        return op.eval(lam) - g;
    }
    /// dF/du0, isotropic only
    double slope(double u0) const {
        const double c = ah.c(0, 0);
        for (std::size_t i = 0; i < 3; ++i) lam[i] = lambda0[i] - u0 * c;
        const auto grad = op.gradient(lam);
        return -c * (grad[0] + grad[1] + grad[2]);
    }
};

std::optional<double> local_solve(const LocalProblem& P, double uc, double step) {
    constexpr int kMaxExpand = 80;
    std::optional<double> fc = P.residual(uc);
    double lo = 0.0, hi = 0.0, f_lo = 0.0, f_hi = 0.0;
    auto settle_between = [&](double good, double f_good, double bad) -> bool {
        // good admissible with f >= 0, bad inadmissible: find admissible point with f < 0
        lo = good;
        f_lo = f_good;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + bad);
            const auto fm = P.residual(mid);
            if (!fm) {
                bad = mid;
            } else if (*fm >= 0.0) {
                lo = mid;
                f_lo = *fm;
            } else {
                hi = mid;
                f_hi = *fm;
                return true;
            }
        }
        return false;
    };
    if (!fc) {
        double x = uc, d = step;
        std::optional<double> fx;
        for (int k = 0; k < kMaxExpand && !fx; ++k) {
            x = uc - d;
            d *= 2.0;
            fx = P.residual(x);
        }
        if (!fx) return std::nullopt;
        if (*fx >= 0.0) {
            if (!settle_between(x, *fx, uc)) return std::nullopt;
        } else {
            fc = fx;
            uc = x;
        }
    }
    if (fc && *fc >= 0.0) {
        double good = uc, f_good = *fc, d = step;
        bool done = false;
        for (int k = 0; k < kMaxExpand && !done; ++k) {
            const double x = good + d;
            d *= 2.0;
            const auto fx = P.residual(x);
            if (!fx) {
                if (!settle_between(good, f_good, x)) return std::nullopt;
                done = true;
            } else if (*fx < 0.0) {
                lo = good;
                f_lo = f_good;
                hi = x;
                f_hi = *fx;
                done = true;
            } else {
                good = x;
                f_good = *fx;
            }
        }
        if (!done) return std::nullopt;
    } else if (fc) {
        hi = uc;
        f_hi = *fc;
        double d = step;
        bool done = false;
        for (int k = 0; k < kMaxExpand && !done; ++k) {
            const double x = hi - d;
            d *= 2.0;
            const auto fx = P.residual(x);
            if (fx && *fx >= 0.0) {
                lo = x;
                f_lo = *fx;
                done = true;
            } else if (fx) {
                hi = x;
                f_hi = *fx;
            }
        }
        if (!done) return std::nullopt;
    }
    if (f_lo == 0.0) return lo;
    // residual is continuous on [lo, hi] and the whole segment is admissible
    auto F = [&](double x) { return *P.residual(x); };
    if (P.isotropic) {
        auto dF = [&](double x) { return P.slope(x); };
        return solve_bracketed(F, dF, {lo, hi, f_lo, f_hi}).x;
    }
    const double xtol = 1e-15 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    return brent(F, {lo, hi, f_lo, f_hi}, xtol, 200).x;
}

LocalProblem make_problem(const ImplicitContext& ctx, const CartesianGrid& grid, const std::vector<double>& u,
                          std::size_t node) {
    const auto x = grid.position(node);
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += 0.5 * ctx.a()[i] * x[i] * x[i];
    LocalProblem P{ctx.op(), assemble_affine_hessian(grid, u, node), ctx.rhs().evaluate(x, s),
                   grid.isotropic(node), {}, std::vector<double>(3)};
    if (P.isotropic) P.lambda0 = eigenvalues_ascending(P.ah.m0);
    return P;
}

}  // namespace

Full3DSolution solve_full3d(const ImplicitContext& ctx, const DomainSpec& domain, const FieldFn& lower,
                            const FieldFn& upper, const FieldFn& outer, const Full3DOptions& options,
                            const FieldFn& initial) {
    if (ctx.a().size() != 3) throw ArgumentError("solve_full3d: only n = 3 is supported");
    Full3DSolution sol{CartesianGrid(domain, options.points, options.half_width), {}, {}};
    const auto& grid = sol.grid;
    const std::size_t total = grid.size();
    const auto& unknowns = grid.unknowns();
    const std::size_t U = unknowns.size();
    auto& u = sol.u;
    u.assign(total, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> lo(U), up(U);
    for (std::size_t id = 0; id < total; ++id) {
        const auto x = grid.position(id);
        if (grid.kind(id) != CartesianGrid::Node::Dirichlet) continue;
        const bool face = domain.level(x) > 1.0 + kOnBoundary;
        u[id] = face ? outer(x) : domain.phi().value(x);
    }
    for (std::size_t q = 0; q < U; ++q) {
        const auto x = grid.position(unknowns[q]);
        lo[q] = lower(x);
        up[q] = upper(x);
        if (!(lo[q] <= up[q])) throw ArgumentError("solve_full3d: lower barrier exceeds upper barrier");
        u[unknowns[q]] = initial ? std::clamp(initial(x), lo[q], up[q]) : lo[q];
    }

    auto& rep = sol.report;
    rep.mode = "full3d";
    rep.unknowns = U;
    rep.stencil_fallbacks = grid.stencil_fallbacks();

    auto residual_norm = [&](const std::vector<double>& field, std::size_t* frozen) {
        std::vector<double> worst(U, 0.0);
        parallel_for_chunks(U, 256, [&](std::size_t b, std::size_t e) {
            for (std::size_t q = b; q < e; ++q) {
                const auto P = make_problem(ctx, grid, field, unknowns[q]);
                const auto r = P.residual(field[unknowns[q]]);
                worst[q] = r ? std::abs(*r) : std::numeric_limits<double>::infinity();
            }
        });
        if (frozen) *frozen = static_cast<std::size_t>(std::count(worst.begin(), worst.end(),
                                                                  std::numeric_limits<double>::infinity()));
        return *std::max_element(worst.begin(), worst.end());
    };

    std::vector<double> next(U), change(U, 0.0);
    std::vector<std::uint8_t> frozen(U);
    rep.residual_history.push_back(residual_norm(u, nullptr));
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        parallel_for_chunks(U, 256, [&](std::size_t b, std::size_t e) {
            for (std::size_t q = b; q < e; ++q) {
                const std::size_t id = unknowns[q];
                const auto P = make_problem(ctx, grid, u, id);
                const double step = std::max(2.0 * std::abs(change[q]), 1e-9 * (1.0 + std::abs(u[id])));
                const auto root = local_solve(P, u[id], step);
                frozen[q] = !root;
                next[q] = root ? std::clamp(u[id] + options.relaxation * (*root - u[id]), lo[q], up[q]) : u[id];
            }
        });
        double max_change = 0.0;
        std::size_t frozen_count = 0, decreases = 0;
        for (std::size_t q = 0; q < U; ++q) {
            const std::size_t id = unknowns[q];
            change[q] = next[q] - u[id];
            if (change[q] < -1e-12 * (1.0 + std::abs(u[id]))) ++decreases;
            max_change = std::max(max_change, std::abs(change[q]));
            frozen_count += frozen[q];
            u[id] = next[q];
        }
        rep.monotonicity_violations += decreases;
        rep.iterations = it + 1;
        rep.last_update = max_change;
        rep.cone_frozen = frozen_count;
        if (options.history_stride > 0 && (it + 1) % options.history_stride == 0)
            rep.residual_history.push_back(residual_norm(u, nullptr));
        if (max_change < options.update_tol && frozen_count == 0) break;
    }

    std::size_t inadmissible = 0;
    rep.residual = residual_norm(u, &inadmissible);
    rep.converged = rep.last_update < options.update_tol && rep.cone_frozen == 0 && inadmissible == 0;
    rep.lower_margin = rep.upper_margin = std::numeric_limits<double>::infinity();
    std::vector<double> svals, uvals;
    for (std::size_t q = 0; q < U; ++q) {
        const std::size_t id = unknowns[q];
        rep.lower_margin = std::min(rep.lower_margin, u[id] - lo[q]);
        rep.upper_margin = std::min(rep.upper_margin, up[q] - u[id]);
    }
    for (std::size_t id = 0; id < total; ++id) {
        if (grid.kind(id) == CartesianGrid::Node::Inside) continue;
        const auto x = grid.position(id);
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) s += 0.5 * ctx.a()[i] * x[i] * x[i];
        svals.push_back(s);
        uvals.push_back(u[id]);
        if (grid.kind(id) == CartesianGrid::Node::Dirichlet && domain.level(x) <= 1.0 + kOnBoundary)
            rep.boundary_error = std::max(rep.boundary_error, std::abs(u[id] - domain.phi().value(x)));
    }
    const auto [mean, sd] = estimate_far_constant(svals, uvals);
    rep.far_constant = mean;
    rep.far_constant_std = sd;
    const double cut = 0.8 * *std::max_element(svals.begin(), svals.end());
    rep.far_nodes = static_cast<std::size_t>(std::count_if(svals.begin(), svals.end(), [&](double v) { return v >= cut; }));
    return sol;
}

std::string full3d_field_csv(const Full3DSolution& sol) {
    std::string out = "# mode,full3d\n";
    out += "# points," + std::to_string(sol.grid.points()) + "\n";
    out += "# spacing," + format_double(sol.grid.spacing()) + "\n";
    out += "x,y,z,u\n";
    for (std::size_t id = 0; id < sol.grid.size(); ++id) {
        if (sol.grid.kind(id) == CartesianGrid::Node::Inside) continue;
        const auto x = sol.grid.position(id);
        out += format_double(x[0]) + "," + format_double(x[1]) + "," + format_double(x[2]) + "," +
               format_double(sol.u[id]) + "\n";
    }
    return out;
}

}  // namespace hessex
