#include "dhc/conic/problem.hpp"

#include "dhc/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/core.h>

namespace dhc::conic {

AffineExpr AffineExpr::variable(std::size_t index, double coef) {
    AffineExpr e;
    e.terms_.emplace_back(index, coef);
    return e;
}

AffineExpr& AffineExpr::add_term(std::size_t index, double coef) {
    if (coef != 0.0) {
        terms_.emplace_back(index, coef);
    }
    return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    constant_ += other.constant_;
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
    for (const auto& [i, c] : other.terms_) {
        terms_.emplace_back(i, -c);
    }
    constant_ -= other.constant_;
    return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
    for (auto& t : terms_) {
        t.second *= s;
    }
    constant_ *= s;
    return *this;
}

AffineExpr& AffineExpr::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
        if (!merged.empty() && merged.back().first == t.first) {
            merged.back().second += t.second;
        } else {
            merged.push_back(t);
        }
    }
    std::erase_if(merged, [](const Term& t) { return t.second == 0.0; });
    terms_ = std::move(merged);
    return *this;
}

double AffineExpr::evaluate(const std::vector<double>& x) const {
    double v = constant_;
    for (const auto& [i, c] : terms_) {
        v += c * x.at(i);
    }
    return v;
}

std::size_t AffineExpr::max_index() const {
    std::size_t m = 0;
    for (const auto& t : terms_) {
        m = std::max(m, t.first);
    }
    return m;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
AffineExpr operator*(AffineExpr a, double s) { return a *= s; }

AffineExpr VarBlock::operator[](std::size_t i) const { return AffineExpr::variable(index(i)); }

std::size_t VarBlock::index(std::size_t i) const {
    if (i >= size) {
        throw ModelError(fmt::format("index {} out of range for variable '{}' of size {}", i, name, size));
    }
    return offset + i;
}

VarBlock ConicProblem::add_variable(const std::string& name, std::size_t size, double lo, double hi) {
    if (size == 0) {
        throw ModelError(fmt::format("variable '{}' has zero size", name));
    }
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
        throw ModelError(fmt::format("variable '{}' has inconsistent bounds [{}, {}]", name, lo, hi));
    }
    for (const auto& b : blocks_) {
        if (b.name == name) {
            throw ModelError(fmt::format("variable '{}' registered twice", name));
        }
    }
    VarBlock block{name, lo_.size(), size};
    for (std::size_t i = 0; i < size; ++i) {
        lo_.push_back(lo);
        hi_.push_back(hi);
        names_.push_back(size == 1 ? name : fmt::format("{}[{}]", name, i));
    }
    blocks_.push_back(block);
    return block;
}

const VarBlock& ConicProblem::block(const std::string& name) const {
    for (const auto& b : blocks_) {
        if (b.name == name) {
            return b;
        }
    }
    throw ModelError(fmt::format("unknown variable '{}'", name));
}

void ConicProblem::set_bounds(std::size_t i, double lo, double hi) {
    if (i >= lo_.size()) {
        throw ModelError(fmt::format("variable index {} is not registered", i));
    }
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
        throw ModelError(fmt::format("inconsistent bounds [{}, {}] for {}", lo, hi, names_[i]));
    }
    lo_[i] = lo;
    hi_[i] = hi;
}

void ConicProblem::check(const AffineExpr& e) const {
    for (const auto& [i, c] : e.terms()) {
        if (i >= lo_.size()) {
            throw ModelError(fmt::format("expression references unregistered variable index {}", i));
        }
        if (!std::isfinite(c)) {
            throw ModelError(fmt::format("non-finite coefficient on {}", names_[i]));
        }
    }
    if (!std::isfinite(e.constant())) {
        throw ModelError("non-finite constant in expression");
    }
}

std::size_t ConicProblem::add_equality(const AffineExpr& lhs, const AffineExpr& rhs, std::string label) {
    auto e = lhs - rhs;
    e.normalize();
    check(e);
    equalities_.push_back({std::move(e), std::move(label)});
    return equalities_.size() - 1;
}

std::size_t ConicProblem::add_less_equal(const AffineExpr& lhs, const AffineExpr& rhs, std::string label) {
    auto e = lhs - rhs;
    e.normalize();
    check(e);
    inequalities_.push_back({std::move(e), std::move(label)});
    return inequalities_.size() - 1;
}

std::size_t ConicProblem::add_greater_equal(const AffineExpr& lhs, const AffineExpr& rhs, std::string label) {
    return add_less_equal(rhs, lhs, std::move(label));
}

std::size_t ConicProblem::add_soc(std::vector<AffineExpr> u, const AffineExpr& t, std::string label) {
    if (u.empty()) {
        throw ModelError("second-order cone needs at least one entry in u (dimension mismatch)");
    }
    for (auto& e : u) {
        e.normalize();
        check(e);
    }
    auto tt = t;
    tt.normalize();
    check(tt);
    cones_.push_back({std::move(u), std::move(tt), std::move(label)});
    return cones_.size() - 1;
}

void ConicProblem::set_objective(Sense sense, const AffineExpr& linear) {
    auto e = linear;
    e.normalize();
    check(e);
    if (sense == Sense::minimize && !log_terms_.empty()) {
        throw ModelError("log terms require a maximization objective");
    }
    sense_ = sense;
    objective_ = std::move(e);
}

void ConicProblem::add_log_term(double weight, const AffineExpr& arg, double x_max) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw ModelError(fmt::format("log term weight must be finite and nonnegative, got {}", weight));
    }
    if (!(x_max > kLogFloor) || !std::isfinite(x_max)) {
        throw ModelError(fmt::format("log term range upper end must exceed {}, got {}", kLogFloor, x_max));
    }
    if (sense_ != Sense::maximize) {
        throw ModelError("log terms require a maximization objective; call set_objective first");
    }
    auto e = arg;
    e.normalize();
    check(e);
    log_terms_.push_back({weight, std::move(e), x_max});
}

double ConicProblem::objective_value(const std::vector<double>& x) const {
    double v = objective_.evaluate(x);
    for (const auto& t : log_terms_) {
        if (t.weight != 0.0) {
            v += t.weight * std::log(std::max(t.arg.evaluate(x), kLogFloor));
        }
    }
    return v;
}

double ConicProblem::max_violation(const std::vector<double>& x) const {
    if (x.size() != lo_.size()) {
        throw ModelError("point has the wrong dimension");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        worst = std::max({worst, lo_[i] - x[i], x[i] - hi_[i]});
    }
    for (const auto& r : equalities_) {
        worst = std::max(worst, std::abs(r.expr.evaluate(x)));
    }
    for (const auto& r : inequalities_) {
        worst = std::max(worst, r.expr.evaluate(x));
    }
    for (const auto& c : cones_) {
        double norm2 = 0.0;
        for (const auto& e : c.u) {
            const double v = e.evaluate(x);
            norm2 += v * v;
        }
        worst = std::max(worst, std::sqrt(norm2) - c.t.evaluate(x));
    }
    for (const auto& t : log_terms_) {
        worst = std::max(worst, kLogFloor - t.arg.evaluate(x));
    }
    return worst;
}

namespace {

std::string render(const AffineExpr& e, const std::vector<std::string>& names) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [i, c] : e.terms()) {
        if (first) {
            out << (c < 0 ? "-" : "");
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        const double a = std::abs(c);
        if (a != 1.0) {
            out << fmt::format("{:.10g} ", a);
        }
        out << names[i];
        first = false;
    }
    if (e.constant() != 0.0 || first) {
        if (first) {
            out << fmt::format("{:.10g}", e.constant());
        } else {
            out << (e.constant() < 0 ? " - " : " + ") << fmt::format("{:.10g}", std::abs(e.constant()));
        }
    }
    return out.str();
}

}  // namespace

std::string ConicProblem::dump() const {
    std::ostringstream out;
    out << (sense_ == Sense::maximize ? "maximize\n  " : "minimize\n  ") << render(objective_, names_);
    for (const auto& t : log_terms_) {
        out << fmt::format(" + {:.10g} log({})", t.weight, render(t.arg, names_));
    }
    out << "\nvariables\n";
    for (const auto& b : blocks_) {
        out << fmt::format("  {} [{}]\n", b.name, b.size);
        for (std::size_t i = 0; i < b.size; ++i) {
            const auto k = b.offset + i;
            if (std::isfinite(lo_[k]) || std::isfinite(hi_[k])) {
                out << fmt::format("    {} <= {} <= {}\n", lo_[k], names_[k], hi_[k]);
            }
        }
    }
    out << "equalities\n";
    for (std::size_t r = 0; r < equalities_.size(); ++r) {
        out << fmt::format("  e{} {}: {} == 0\n", r, equalities_[r].label, render(equalities_[r].expr, names_));
    }
    out << "inequalities\n";
    for (std::size_t r = 0; r < inequalities_.size(); ++r) {
        out << fmt::format("  i{} {}: {} <= 0\n", r, inequalities_[r].label, render(inequalities_[r].expr, names_));
    }
    out << "cones\n";
    for (std::size_t k = 0; k < cones_.size(); ++k) {
        out << fmt::format("  q{} {} (dim {}): ||(", k, cones_[k].label, cones_[k].u.size() + 1);
        for (std::size_t j = 0; j < cones_[k].u.size(); ++j) {
            out << (j ? ", " : "") << render(cones_[k].u[j], names_);
        }
        out << ")|| <= " << render(cones_[k].t, names_) << "\n";
    }
    return out.str();
}

}  // namespace dhc::conic
