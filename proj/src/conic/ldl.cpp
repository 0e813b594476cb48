#include "dhc/conic/ldl.hpp"

#include "dhc/common/error.hpp"

#include <Eigen/OrderingMethods>

namespace dhc::conic {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat permuted_upper(const SpMat& lower, const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>& perm) {
    SpMat up(lower.rows(), lower.cols());
    up.selfadjointView<Eigen::Upper>() = lower.selfadjointView<Eigen::Lower>().twistedBy(perm);
    up.makeCompressed();
    return up;
}

}  // namespace

void QuasiDefiniteLdl::analyze(const SpMat& lower, std::vector<int> signs) {
    n_ = lower.rows();
    if (lower.cols() != n_ || static_cast<Eigen::Index>(signs.size()) != n_) {
        throw ModelError("LDL analysis: dimension mismatch");
    }
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p;
    const SpMat full = SpMat(lower.selfadjointView<Eigen::Lower>());
    amd(full, p);
    // Eigen returns the inverse ordering; twistedBy wants old -> new
    perm_ = p.inverse();

    signs_.assign(n_, 1);
    for (Eigen::Index i = 0; i < n_; ++i) {
        signs_[perm_.indices()[i]] = signs[i];
    }

    const SpMat up = permuted_upper(lower, perm_);
    const int* ap = up.outerIndexPtr();
    const int* ai = up.innerIndexPtr();
    etree_.assign(n_, -1);
    lnz_.assign(n_, 0);
    std::vector<int> work(n_, -1);
    for (int j = 0; j < n_; ++j) {
        work[j] = j;
        for (int q = ap[j]; q < ap[j + 1]; ++q) {
            int i = ai[q];
            while (i != j && work[i] != j) {
                if (etree_[i] == -1) {
                    etree_[i] = j;
                }
                ++lnz_[i];
                work[i] = j;
                i = etree_[i];
            }
        }
    }
    lp_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) {
        lp_[i + 1] = lp_[i] + lnz_[i];
    }
    li_.assign(lp_[n_], 0);
    lx_.assign(lp_[n_], 0.0);
    d_.assign(n_, 0.0);
    dinv_.assign(n_, 0.0);
}

void QuasiDefiniteLdl::factorize(const SpMat& lower) {
    const SpMat up = permuted_upper(lower, perm_);
    const int* ap = up.outerIndexPtr();
    const int* ai = up.innerIndexPtr();
    const double* ax = up.valuePtr();

    std::vector<double> y(n_, 0.0);
    std::vector<char> marked(n_, 0);
    std::vector<int> next(lp_.begin(), lp_.end() - 1);
    std::vector<int> pattern(n_), stack(n_);
    boosted_ = 0;

    for (int k = 0; k < n_; ++k) {
        int ny = 0;
        d_[k] = 0.0;
        for (int q = ap[k]; q < ap[k + 1]; ++q) {
            const int b = ai[q];
            if (b == k) {
                d_[k] = ax[q];
                continue;
            }
            y[b] = ax[q];
            if (marked[b]) {
                continue;
            }
            int depth = 0;
            int i = b;
            while (i != -1 && i < k && !marked[i]) {
                marked[i] = 1;
                stack[depth++] = i;
                i = etree_[i];
            }
            while (depth > 0) {
                pattern[ny++] = stack[--depth];
            }
        }
        for (int t = ny - 1; t >= 0; --t) {
            const int c = pattern[t];
            const int slot = next[c];
            const double yc = y[c];
            for (int j = lp_[c]; j < slot; ++j) {
                y[li_[j]] -= lx_[j] * yc;
            }
            li_[slot] = k;
            lx_[slot] = yc * dinv_[c];
            d_[k] -= yc * lx_[slot];
            ++next[c];
            y[c] = 0.0;
            marked[c] = 0;
        }
        if (signs_[k] * d_[k] <= pivot_floor) {
            d_[k] = signs_[k] * pivot_boost;
            ++boosted_;
        }
        dinv_[k] = 1.0 / d_[k];
    }
}

Eigen::VectorXd QuasiDefiniteLdl::solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = perm_ * rhs;
    for (int i = 0; i < n_; ++i) {
        for (int j = lp_[i]; j < lp_[i + 1]; ++j) {
            x[li_[j]] -= lx_[j] * x[i];
        }
    }
    for (int i = 0; i < n_; ++i) {
        x[i] *= dinv_[i];
    }
    for (int i = static_cast<int>(n_) - 1; i >= 0; --i) {
        for (int j = lp_[i]; j < lp_[i + 1]; ++j) {
            x[i] -= lx_[j] * x[li_[j]];
        }
    }
    return perm_.transpose() * x;
}

}  // namespace dhc::conic
