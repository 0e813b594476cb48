#include "dhc/conic/ipm.hpp"

#include "dhc/conic/ldl.hpp"

#include "dhc/common/error.hpp"

#include <Eigen/SparseLU>


#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dhc::conic {

namespace {

using Eigen::VectorXd;
using Index = Eigen::Index;

/// Cone bookkeeping plus the Nesterov-Todd scaling at the current iterate.
class ConeSet {
public:
    explicit ConeSet(const StandardForm& p) : orthant_(static_cast<Index>(p.orthant)) {
        Index offset = orthant_;
        for (auto d : p.soc_dims) {
            if (d < 1) {
                throw ModelError("second-order cone of dimension zero");
            }
            offsets_.push_back(offset);
            dims_.push_back(static_cast<Index>(d));
            offset += static_cast<Index>(d);
        }
        size_ = offset;
        wl_ = VectorXd::Ones(orthant_);
        eta_.assign(dims_.size(), 1.0);
        wbar_.resize(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            wbar_[k] = VectorXd::Zero(dims_[k]);
            wbar_[k](0) = 1.0;
        }
    }

    Index size() const { return size_; }
    Index orthant() const { return orthant_; }
    std::size_t cone_count() const { return dims_.size(); }
    Index offset(std::size_t k) const { return offsets_[k]; }
    Index dim(std::size_t k) const { return dims_[k]; }
    double degree() const { return static_cast<double>(orthant_ + static_cast<Index>(dims_.size())); }

    /// Smallest "eigenvalue" of v with respect to the cone (negative outside).
    double margin(const VectorXd& v) const {
        double m = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < orthant_; ++i) {
            m = std::min(m, v(i));
        }
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const auto seg = v.segment(offsets_[k], dims_[k]);
            m = std::min(m, seg(0) - seg.tail(dims_[k] - 1).norm());
        }
        return m;
    }

    VectorXd identity() const {
        VectorXd e = VectorXd::Zero(size_);
        e.head(orthant_).setOnes();
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            e(offsets_[k]) = 1.0;
        }
        return e;
    }

    void shift_into_interior(VectorXd& v) const {
        const double m = margin(v);
        if (m <= 0.0 || !std::isfinite(m)) {
            v += (1.0 - (std::isfinite(m) ? m : 0.0)) * identity();
        }
    }

    /// Recomputes W from s and z (both interior) and returns lambda = W z.
    bool update_scaling(const VectorXd& s, const VectorXd& z, VectorXd& lambda) {
        lambda.resize(size_);
        for (Index i = 0; i < orthant_; ++i) {
            if (!(s(i) > 0.0) || !(z(i) > 0.0)) {
                return false;
            }
            wl_(i) = std::sqrt(s(i) / z(i));
            lambda(i) = std::sqrt(s(i) * z(i));
        }
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const auto sk = s.segment(offsets_[k], dims_[k]);
            const auto zk = z.segment(offsets_[k], dims_[k]);
            const double s1n = sk.tail(dims_[k] - 1).norm();
            const double z1n = zk.tail(dims_[k] - 1).norm();
            const double sres = (sk(0) - s1n) * (sk(0) + s1n);
            const double zres = (zk(0) - z1n) * (zk(0) + z1n);
            if (!(sk(0) > s1n) || !(zk(0) > z1n) || !(sres > 0.0) || !(zres > 0.0)) {
                return false;
            }
            const VectorXd sbar = sk / std::sqrt(sres);
            const VectorXd zbar = zk / std::sqrt(zres);
            const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
            VectorXd& w = wbar_[k];
            w.resize(dims_[k]);
            w(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
            w.tail(dims_[k] - 1) = (sbar.tail(dims_[k] - 1) - zbar.tail(dims_[k] - 1)) / (2.0 * gamma);
            eta_[k] = std::pow(sres / zres, 0.25);
        }
        lambda = apply_w(z);
        return lambda.allFinite();
    }

    VectorXd apply_w(const VectorXd& v) const { return apply(v, false); }
    VectorXd apply_winv(const VectorXd& v) const { return apply(v, true); }
    VectorXd apply_w2(const VectorXd& v) const { return apply_w(apply_w(v)); }

    /// Dense W^-1 block of cone k.
    Eigen::MatrixXd winv_block(std::size_t k) const {
        const auto& w = wbar_[k];
        const Index t = dims_[k] - 1;
        Eigen::MatrixXd m(dims_[k], dims_[k]);
        m(0, 0) = w(0);
        m.block(0, 1, 1, t) = -w.tail(t).transpose();
        m.block(1, 0, t, 1) = -w.tail(t);
        m.block(1, 1, t, t) = Eigen::MatrixXd::Identity(t, t) + w.tail(t) * w.tail(t).transpose() / (1.0 + w(0));
        return m / eta_[k];
    }
    double w_orthant(Index i) const { return wl_(i); }

    /// Jordan product u o v.
    VectorXd product(const VectorXd& u, const VectorXd& v) const {
        VectorXd r(size_);
        r.head(orthant_) = u.head(orthant_).cwiseProduct(v.head(orthant_));
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const auto uk = u.segment(offsets_[k], dims_[k]);
            const auto vk = v.segment(offsets_[k], dims_[k]);
            auto rk = r.segment(offsets_[k], dims_[k]);
            const Index t = dims_[k] - 1;
            rk(0) = uk.dot(vk);
            rk.tail(t) = uk(0) * vk.tail(t) + vk(0) * uk.tail(t);
        }
        return r;
    }

    /// Solves lambda o x = r for x.
    VectorXd divide(const VectorXd& lambda, const VectorXd& r) const {
        VectorXd x(size_);
        x.head(orthant_) = r.head(orthant_).cwiseQuotient(lambda.head(orthant_));
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const auto lk = lambda.segment(offsets_[k], dims_[k]);
            const auto rk = r.segment(offsets_[k], dims_[k]);
            auto xk = x.segment(offsets_[k], dims_[k]);
            const Index t = dims_[k] - 1;
            const double l1n = lk.tail(t).norm();
            const double det = (lk(0) - l1n) * (lk(0) + l1n);
            xk(0) = (lk(0) * rk(0) - lk.tail(t).dot(rk.tail(t))) / det;
            xk.tail(t) = (rk.tail(t) - xk(0) * lk.tail(t)) / lk(0);
        }
        return x;
    }

    /// Largest alpha with v + alpha d inside the cone (capped at `cap`).
    double max_step(const VectorXd& v, const VectorXd& d, double cap) const {
        double alpha = cap;
        for (Index i = 0; i < orthant_; ++i) {
            if (d(i) < 0.0) {
                alpha = std::min(alpha, -v(i) / d(i));
            }
        }
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const auto vk = v.segment(offsets_[k], dims_[k]);
            const auto dk = d.segment(offsets_[k], dims_[k]);
            const Index t = dims_[k] - 1;
            const double v1n = vk.tail(t).norm();
            const double a = dk(0) * dk(0) - dk.tail(t).squaredNorm();
            const double b = 2.0 * (vk(0) * dk(0) - vk.tail(t).dot(dk.tail(t)));
            const double c = std::max(0.0, (vk(0) - v1n) * (vk(0) + v1n));
            alpha = std::min(alpha, smallest_positive_root(a, b, c));
            if (dk(0) < 0.0) {
                alpha = std::min(alpha, -vk(0) / dk(0));
            }
        }
        return std::max(alpha, 0.0);
    }

private:
    static double smallest_positive_root(double a, double b, double c) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
        if (std::abs(a) <= 1e-14 * scale) {
            return b < 0.0 ? -c / b : inf;
        }
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) {
            return inf;
        }
        const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
        double best = inf;
        for (double r : {q / a, q != 0.0 ? c / q : inf}) {
            if (r > 0.0) {
                best = std::min(best, r);
            }
        }
        return best;
    }

    VectorXd apply(const VectorXd& v, bool inverse) const {
        VectorXd r(size_);
        if (inverse) {
            r.head(orthant_) = v.head(orthant_).cwiseQuotient(wl_);
        } else {
            r.head(orthant_) = v.head(orthant_).cwiseProduct(wl_);
        }
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const auto vk = v.segment(offsets_[k], dims_[k]);
            auto rk = r.segment(offsets_[k], dims_[k]);
            const auto& w = wbar_[k];
            const Index t = dims_[k] - 1;
            const double w1v1 = w.tail(t).dot(vk.tail(t));
            const double sign = inverse ? -1.0 : 1.0;
            const double scale = inverse ? 1.0 / eta_[k] : eta_[k];
            rk(0) = scale * (w(0) * vk(0) + sign * w1v1);
            rk.tail(t) = scale * (vk.tail(t) + (sign * vk(0) + w1v1 / (1.0 + w(0))) * w.tail(t));
        }
        return r;
    }

    Index orthant_ = 0;
    Index size_ = 0;
    std::vector<Index> offsets_;
    std::vector<Index> dims_;
    VectorXd wl_;
    std::vector<double> eta_;
    std::vector<VectorXd> wbar_;
};

/// Regularized quasi-definite KKT system [[0, A', G'], [A, 0, 0], [G, 0, -W^2]].
/// Reduced KKT system in scaled form: z = W^-1 zt with
///   [ dI   A'   Gt' ] [x ]   [r1      ]
///   [ A   -dI   0   ] [y ] = [r2      ]
///   [ Gt   0   -I   ] [zt]   [W^-1 r3 ],   Gt = W^-1 G.
/// The -I block keeps every z pivot away from zero however badly W is scaled.
class KktSystem {
public:
    KktSystem(const StandardForm& p, const ConeSet& cones, const IpmSettings& settings)
        : p_(p), cones_(cones), settings_(settings), g_rows_(p.G) {
        n_ = p.c.size();
        neq_ = p.A.rows();
        m_ = p.G.rows();
        g_rows_.makeCompressed();
        block_cols_.resize(cones.cone_count());
        for (std::size_t k = 0; k < cones.cone_count(); ++k) {
            std::vector<int>& cols = block_cols_[k];
            for (Index r = cones.offset(k); r < cones.offset(k) + cones.dim(k); ++r) {
                for (RowMajor::InnerIterator it(g_rows_, r); it; ++it) {
                    cols.push_back(static_cast<int>(it.col()));
                }
            }
            std::sort(cols.begin(), cols.end());
            cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        }
        scale(true);
        std::vector<int> signs(n_ + neq_ + m_, -1);
        std::fill(signs.begin(), signs.begin() + n_, 1);
        ldl_.analyze(K_, std::move(signs));
    }

    /// Refactors with the current scaling; identity scaling when `identity` is set.
    bool factor(bool identity) {
        scale(identity);
        ldl_.factorize(K_);
        lu_active_ = false;
        return true;
    }

    /// Solves the unscaled system, refining against it with the scaled factors.
    /// Falls back to a pivoted LU when the static-pivot LDL' cannot reach the target.
    VectorXd solve(const VectorXd& rhs) const {
        const double target = 1e-13 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
        double err = 0.0;
        VectorXd u = refine(rhs, target, err);
        if (err > target * 1e3 && !lu_active_ && factor_lu()) {
            double lu_err = 0.0;
            VectorXd v = refine(rhs, target, lu_err);
            if (lu_err < err) {
                u = std::move(v);
            }
        }
        return u;
    }

    Index n() const { return n_; }
    Index neq() const { return neq_; }
    Index m() const { return m_; }

private:
    using RowMajor = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    /// Rebuilds Gt and the regularized matrix; the pattern never changes.
    void scale(bool identity) {
        identity_ = identity;
        const double delta = settings_.regularization;
        std::vector<Eigen::Triplet<double>> gt;
        gt.reserve(static_cast<std::size_t>(g_rows_.nonZeros()) * 2);
        for (Index i = 0; i < cones_.orthant(); ++i) {
            const double f = identity ? 1.0 : 1.0 / cones_.w_orthant(i);
            for (RowMajor::InnerIterator it(g_rows_, i); it; ++it) {
                gt.emplace_back(i, it.col(), f * it.value());
            }
        }
        for (std::size_t k = 0; k < cones_.cone_count(); ++k) {
            const Index o = cones_.offset(k);
            const Index d = cones_.dim(k);
            const auto& cols = block_cols_[k];
            Eigen::MatrixXd block = Eigen::MatrixXd::Zero(d, static_cast<Index>(cols.size()));
            for (Index r = 0; r < d; ++r) {
                for (RowMajor::InnerIterator it(g_rows_, o + r); it; ++it) {
                    const auto pos = std::lower_bound(cols.begin(), cols.end(), static_cast<int>(it.col())) - cols.begin();
                    block(r, pos) = it.value();
                }
            }
            if (!identity) {
                block = cones_.winv_block(k) * block;
            }
            for (Index r = 0; r < d; ++r) {
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    gt.emplace_back(o + r, cols[c], block(r, static_cast<Index>(c)));
                }
            }
        }
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(gt.size() + static_cast<std::size_t>(p_.A.nonZeros() + n_ + neq_ + m_));
        for (Index i = 0; i < n_; ++i) {
            trips.emplace_back(i, i, delta);
        }
        for (Index j = 0; j < p_.A.outerSize(); ++j) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(p_.A, j); it; ++it) {
                trips.emplace_back(n_ + it.row(), it.col(), it.value());
            }
        }
        for (const auto& t : gt) {
            trips.emplace_back(n_ + neq_ + t.row(), t.col(), t.value());
        }
        for (Index i = 0; i < neq_; ++i) {
            trips.emplace_back(n_ + i, n_ + i, -delta);
        }
        for (Index i = 0; i < m_; ++i) {
            trips.emplace_back(n_ + neq_ + i, n_ + neq_ + i, -1.0 - delta);
        }
        const Index dim = n_ + neq_ + m_;
        K_.resize(dim, dim);
        K_.setFromTriplets(trips.begin(), trips.end());
        K_.makeCompressed();
        trips_ = std::move(trips);
    }

    VectorXd refine(const VectorXd& rhs, double target, double& err) const {
        VectorXd u = solve_scaled(rhs);
        VectorXd r = rhs - multiply(u);
        err = r.lpNorm<Eigen::Infinity>();
        for (int it = 0; it < settings_.refinement_steps && err > target; ++it) {
            const VectorXd trial = u + solve_scaled(r);
            const VectorXd trial_r = rhs - multiply(trial);
            const double trial_err = trial_r.lpNorm<Eigen::Infinity>();
            if (!(trial_err < 0.5 * err)) {
                break;
            }
            u = trial;
            r = trial_r;
            err = trial_err;
        }
        return u;
    }

    bool factor_lu() const {
        std::vector<Eigen::Triplet<double>> full;
        full.reserve(2 * trips_.size());
        for (const auto& t : trips_) {
            if (t.row() == t.col()) {
                // drop the static regularization
                full.emplace_back(t.row(), t.col(), t.row() < n_ + neq_ ? 0.0 : -1.0);
            } else {
                full.emplace_back(t.row(), t.col(), t.value());
                full.emplace_back(t.col(), t.row(), t.value());
            }
        }
        Eigen::SparseMatrix<double> k(K_.rows(), K_.cols());
        k.setFromTriplets(full.begin(), full.end());
        k.makeCompressed();
        // the pattern is fixed, so the column ordering is computed once
        if (!lu_analyzed_) {
            lu_.analyzePattern(k);
            lu_analyzed_ = true;
        }
        lu_.factorize(k);
        lu_active_ = lu_.info() == Eigen::Success;
        return lu_active_;
    }

    VectorXd solve_scaled(VectorXd r) const {
        if (!identity_) {
            r.tail(m_) = cones_.apply_winv(r.tail(m_));
        }
        VectorXd u = lu_active_ ? VectorXd(lu_.solve(r)) : ldl_.solve(r);
        if (!identity_) {
            u.tail(m_) = cones_.apply_winv(u.tail(m_));
        }
        return u;
    }

    /// Product with the unregularized, unscaled KKT matrix.
    VectorXd multiply(const VectorXd& u) const {
        const auto ux = u.head(n_);
        const auto uy = u.segment(n_, neq_);
        const VectorXd uz = u.tail(m_);
        VectorXd r(u.size());
        r.head(n_) = p_.A.transpose() * uy + p_.G.transpose() * uz;
        r.segment(n_, neq_) = p_.A * ux;
        r.tail(m_) = p_.G * ux - (identity_ ? uz : cones_.apply_w2(uz));
        return r;
    }

    const StandardForm& p_;
    const ConeSet& cones_;
    const IpmSettings& settings_;
    RowMajor g_rows_;
    std::vector<std::vector<int>> block_cols_;
    Index n_ = 0, neq_ = 0, m_ = 0;
    Eigen::SparseMatrix<double> K_;
    std::vector<Eigen::Triplet<double>> trips_;
    QuasiDefiniteLdl ldl_;
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    mutable bool lu_analyzed_ = false;
    mutable bool lu_active_ = false;
    bool identity_ = true;
};

struct Direction {
    VectorXd dx, dy, dz, ds;
    double dtau = 0.0;
    double dkap = 0.0;
};

IpmResult solve_embedding(const StandardForm& p, const IpmSettings& settings) {
    const Index n = p.c.size();
    ConeSet cones(p);
    if (cones.size() != p.G.rows()) {
        throw ModelError("cone dimensions do not match the number of inequality rows");
    }
    const Index neq = p.A.rows();
    const Index m = p.G.rows();
    KktSystem kkt(p, cones, settings);

    IpmResult result;
    IpmResult best;
    double best_merit = std::numeric_limits<double>::infinity();
    auto fail = [&](IpmStatus status) {
        result.status = status;
        return result;
    };
    // near the optimum the KKT system can degrade faster than the iterate improves
    auto stalled = [&](IpmStatus status) {
        if (best_merit < 1.0) {
            best.status = IpmStatus::optimal;
            best.reduced_accuracy = true;
            return best;
        }
        return fail(status);
    };

    // initial point: least-squares primal and dual points shifted into the cones
    if (!kkt.factor(true)) {
        return fail(IpmStatus::numerical_failure);
    }
    VectorXd rhs(n + neq + m);
    rhs << VectorXd::Zero(n), p.b, p.h;
    VectorXd u = kkt.solve(rhs);
    VectorXd x = u.head(n);
    VectorXd s = -u.tail(m);
    cones.shift_into_interior(s);
    rhs << -p.c, VectorXd::Zero(neq), VectorXd::Zero(m);
    u = kkt.solve(rhs);
    VectorXd y = u.segment(n, neq);
    VectorXd z = u.tail(m);
    cones.shift_into_interior(z);
    double tau = 1.0;
    double kap = 1.0;

    const double resx0 = std::max(1.0, p.c.norm());
    const double resy0 = std::max(1.0, p.b.norm());
    const double resz0 = std::max(1.0, p.h.norm());
    const VectorXd e = cones.identity();
    const double degree = cones.degree();

    VectorXd lambda;
    VectorXd u1;
    for (int iter = 0; iter <= settings.max_iterations; ++iter) {
        result.iterations = iter;
        const VectorXd Aty_Gtz = p.A.transpose() * y + p.G.transpose() * z;
        const VectorXd rx = Aty_Gtz + p.c * tau;
        const VectorXd Ax = p.A * x;
        const VectorXd Gx = p.G * x;
        const VectorXd ry = -Ax + p.b * tau;
        const VectorXd rz = -Gx + p.h * tau - s;
        const double cx = p.c.dot(x);
        const double by_hz = p.b.dot(y) + p.h.dot(z);
        const double rt = -cx - by_hz - kap;
        const double gap = s.dot(z);
        const double mu = (gap + tau * kap) / (degree + 1.0);

        result.x = x / tau;
        result.y = y / tau;
        result.z = z / tau;
        result.s = s / tau;
        result.primal_cost = cx / tau;
        result.dual_cost = -by_hz / tau;
        result.primal_residual = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
        result.dual_residual = rx.norm() / resx0 / tau;
        result.gap = gap / (tau * tau);
        if (!std::isfinite(result.primal_residual) || !std::isfinite(result.dual_residual) ||
            !std::isfinite(result.gap)) {
            return stalled(IpmStatus::numerical_failure);
        }

        if (settings.verbose) {
            std::fprintf(stderr, "%3d pcost %+.6e dcost %+.6e gap %.2e pres %.2e dres %.2e tau %.2e kap %.2e\n", iter,
                         result.primal_cost, result.dual_cost, result.gap, result.primal_residual,
                         result.dual_residual, tau, kap);
        }
        double relgap = std::numeric_limits<double>::infinity();
        if (result.primal_cost < 0.0) {
            relgap = result.gap / -result.primal_cost;
        } else if (result.dual_cost > 0.0) {
            relgap = result.gap / result.dual_cost;
        }
        if (result.primal_residual < settings.feastol && result.dual_residual < settings.feastol &&
            (result.gap < settings.abstol || relgap < settings.reltol)) {
            result.status = IpmStatus::optimal;
            return result;
        }
        // below 1 once the reduced tolerances hold
        const double merit = std::max({result.primal_residual / settings.feastol_reduced,
                                       result.dual_residual / settings.feastol_reduced,
                                       std::min(result.gap / settings.abstol_reduced, relgap / settings.reltol_reduced)});
        if (merit < best_merit) {
            best_merit = merit;
            best = result;
        } else if (best_merit < 1.0 && result.primal_residual > 100.0 * best.primal_residual) {
            return stalled(IpmStatus::numerical_failure);
        }
        // certificates of infeasibility (scale invariant in the unnormalized iterate)
        if (by_hz < 0.0 && Aty_Gtz.norm() / resx0 < settings.feastol * -by_hz) {
            result.x = x;
            result.y = y / -by_hz;
            result.z = z / -by_hz;
            return fail(IpmStatus::primal_infeasible);
        }
        if (cx < 0.0 && std::max(Ax.norm() / resy0, (Gx + s).norm() / resz0) < settings.feastol * -cx) {
            result.x = x / -cx;
            return fail(IpmStatus::dual_infeasible);
        }
        if (iter == settings.max_iterations) {
            break;
        }

        if (!cones.update_scaling(s, z, lambda) || !kkt.factor(false)) {
            return stalled(IpmStatus::numerical_failure);
        }
        rhs << -p.c, p.b, p.h;
        u1 = kkt.solve(rhs);
        const double g1 = p.c.dot(u1.head(n)) + p.b.dot(u1.segment(n, neq)) + p.h.dot(u1.tail(m));

        auto direction = [&](double eta, const VectorXd& xi, double dk_c) {
            Direction d;
            const VectorXd wxi = cones.apply_w(xi);
            rhs << -eta * rx, eta * ry, eta * rz + wxi;
            const VectorXd u0 = kkt.solve(rhs);
            const double g0 = p.c.dot(u0.head(n)) + p.b.dot(u0.segment(n, neq)) + p.h.dot(u0.tail(m));
            d.dtau = (-eta * rt + g0 - dk_c / tau) / (kap / tau - g1);
            const VectorXd full = u0 + d.dtau * u1;
            d.dx = full.head(n);
            d.dy = full.segment(n, neq);
            d.dz = full.tail(m);
            d.ds = -wxi - cones.apply_w2(d.dz);
            d.dkap = (-dk_c - kap * d.dtau) / tau;
            return d;
        };
        auto step = [&](const Direction& d) {
            double alpha = std::min(cones.max_step(s, d.ds, 1e6), cones.max_step(z, d.dz, 1e6));
            if (d.dtau < 0.0) {
                alpha = std::min(alpha, -tau / d.dtau);
            }
            if (d.dkap < 0.0) {
                alpha = std::min(alpha, -kap / d.dkap);
            }
            return alpha;
        };

        // predictor
        const Direction aff = direction(1.0, lambda, kap * tau);
        const double alpha_aff = std::min(1.0, step(aff));
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

        // corrector
        const VectorXd ds_c = cones.product(lambda, lambda) +
                              cones.product(cones.apply_winv(aff.ds), cones.apply_w(aff.dz)) - sigma * mu * e;
        const VectorXd xi = cones.divide(lambda, ds_c);
        const double dk_c = kap * tau + aff.dkap * aff.dtau - sigma * mu;
        const Direction d = direction(1.0 - sigma, xi, dk_c);
        const double alpha = std::min(1.0, settings.step_fraction * step(d));
        if (!(alpha > 0.0) || !d.dx.allFinite() || !std::isfinite(d.dtau)) {
            return stalled(IpmStatus::numerical_failure);
        }

        x += alpha * d.dx;
        y += alpha * d.dy;
        z += alpha * d.dz;
        s += alpha * d.ds;
        tau += alpha * d.dtau;
        kap += alpha * d.dkap;
    }
    return stalled(IpmStatus::max_iterations);
}

/// Diagonal scalings with A_s = Ea A D and G_s = Eg G D; Eg is constant on each cone.
struct Equilibration {
    VectorXd d, ea, eg;
};

Equilibration ruiz(const StandardForm& p, int passes) {
    const Index n = p.c.size();
    Equilibration q{VectorXd::Ones(n), VectorXd::Ones(p.A.rows()), VectorXd::Ones(p.G.rows())};
    const auto safe = [](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; };
    for (int pass = 0; pass < passes; ++pass) {
        VectorXd col = VectorXd::Zero(n);
        VectorXd row_a = VectorXd::Zero(p.A.rows());
        VectorXd row_g = VectorXd::Zero(p.G.rows());
        for (Index j = 0; j < n; ++j) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(p.A, j); it; ++it) {
                const double v = std::abs(q.ea(it.row()) * it.value() * q.d(j));
                col(j) = std::max(col(j), v);
                row_a(it.row()) = std::max(row_a(it.row()), v);
            }
            for (Eigen::SparseMatrix<double>::InnerIterator it(p.G, j); it; ++it) {
                const double v = std::abs(q.eg(it.row()) * it.value() * q.d(j));
                col(j) = std::max(col(j), v);
                row_g(it.row()) = std::max(row_g(it.row()), v);
            }
        }
        Index o = static_cast<Index>(p.orthant);
        for (auto dim : p.soc_dims) {
            auto blk = row_g.segment(o, static_cast<Index>(dim));
            blk.setConstant(blk.maxCoeff());
            o += static_cast<Index>(dim);
        }
        for (Index j = 0; j < n; ++j) {
            q.d(j) *= safe(col(j));
        }
        for (Index i = 0; i < row_a.size(); ++i) {
            q.ea(i) *= safe(row_a(i));
        }
        for (Index i = 0; i < row_g.size(); ++i) {
            q.eg(i) *= safe(row_g(i));
        }
    }
    return q;
}

}  // namespace

IpmResult solve_ipm(const StandardForm& p, const IpmSettings& settings) {
    const Index n = p.c.size();
    if (p.A.cols() != n || p.G.cols() != n || p.A.rows() != p.b.size() || p.G.rows() != p.h.size()) {
        throw ModelError("standard form has inconsistent dimensions");
    }
    if (settings.equilibration_passes <= 0) {
        return solve_embedding(p, settings);
    }
    const Equilibration q = ruiz(p, settings.equilibration_passes);
    StandardForm sp;
    sp.c = q.d.cwiseProduct(p.c);
    sp.A = q.ea.asDiagonal() * p.A * q.d.asDiagonal();
    sp.b = q.ea.cwiseProduct(p.b);
    sp.G = q.eg.asDiagonal() * p.G * q.d.asDiagonal();
    sp.h = q.eg.cwiseProduct(p.h);
    sp.orthant = p.orthant;
    sp.soc_dims = p.soc_dims;
    IpmResult r = solve_embedding(sp, settings);
    if (r.x.size() != n) {
        return r;
    }
    r.x = q.d.cwiseProduct(r.x);
    r.y = q.ea.cwiseProduct(r.y);
    r.z = q.eg.cwiseProduct(r.z);
    r.s = r.s.cwiseQuotient(q.eg);
    // report residuals against the caller's data
    const double ry = (p.A * r.x - p.b).norm() / std::max(1.0, p.b.norm());
    const double rz = (p.G * r.x + r.s - p.h).norm() / std::max(1.0, p.h.norm());
    r.primal_residual = std::max(ry, rz);
    r.dual_residual = (p.A.transpose() * r.y + p.G.transpose() * r.z + p.c).norm() / std::max(1.0, p.c.norm());
    r.gap = r.s.dot(r.z);
    return r;
}

}  // namespace dhc::conic
