#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace dhc::conic {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Sparse affine function of the scalar decision variables: sum(coef * x[index]) + constant.
class AffineExpr {
public:
    using Term = std::pair<std::size_t, double>;

    AffineExpr() = default;
    AffineExpr(double constant) : constant_(constant) {}  // NOLINT(google-explicit-constructor)
    static AffineExpr variable(std::size_t index, double coef = 1.0);

    const std::vector<Term>& terms() const { return terms_; }
    double constant() const { return constant_; }

    AffineExpr& add_term(std::size_t index, double coef);
    AffineExpr& operator+=(const AffineExpr& other);
    AffineExpr& operator-=(const AffineExpr& other);
    AffineExpr& operator*=(double s);

    /// Sorts terms by index and merges duplicates; drops exact zeros.
    AffineExpr& normalize();

    double evaluate(const std::vector<double>& x) const;
    std::size_t max_index() const;

private:
    std::vector<Term> terms_;
    double constant_ = 0.0;
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a);
AffineExpr operator*(double s, AffineExpr a);
AffineExpr operator*(AffineExpr a, double s);

/// Handle to a named vector of scalar variables.
struct VarBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;

    AffineExpr operator[](std::size_t i) const;
    std::size_t index(std::size_t i) const;
};

enum class Sense { minimize, maximize };

struct SocConstraint {
    std::vector<AffineExpr> u;
    AffineExpr t;
    std::string label;
};

struct Row {
    AffineExpr expr;  ///< expr == 0 for equalities, expr <= 0 for inequalities
    std::string label;
};

struct LogTerm {
    double weight = 0.0;
    AffineExpr arg;
    double x_max = 1.0;  ///< upper end of the approximation grid
};

/// Convex conic program: linear/log objective, linear rows, second-order cones.
class ConicProblem {
public:
    /// Registers a named block of scalar variables with elementwise bounds.
    VarBlock add_variable(const std::string& name, std::size_t size, double lo = -kInf, double hi = kInf);

    std::size_t variable_count() const { return lo_.size(); }
    const std::vector<VarBlock>& blocks() const { return blocks_; }
    const VarBlock& block(const std::string& name) const;
    double lower_bound(std::size_t i) const { return lo_.at(i); }
    double upper_bound(std::size_t i) const { return hi_.at(i); }
    void set_bounds(std::size_t i, double lo, double hi);

    /// lhs == rhs. Returns the row id.
    std::size_t add_equality(const AffineExpr& lhs, const AffineExpr& rhs = {}, std::string label = {});
    /// lhs <= rhs. Returns the row id.
    std::size_t add_less_equal(const AffineExpr& lhs, const AffineExpr& rhs = {}, std::string label = {});
    std::size_t add_greater_equal(const AffineExpr& lhs, const AffineExpr& rhs = {}, std::string label = {});
    /// ||u||_2 <= t. Throws ModelError on empty u.
    std::size_t add_soc(std::vector<AffineExpr> u, const AffineExpr& t, std::string label = {});

    void set_objective(Sense sense, const AffineExpr& linear);
    /// Adds weight * log(arg) to a maximization objective. The argument gets a floor
    /// of kLogFloor; x_max bounds the range where the approximation is tight.
    void add_log_term(double weight, const AffineExpr& arg, double x_max);

    Sense sense() const { return sense_; }
    const AffineExpr& linear_objective() const { return objective_; }
    const std::vector<LogTerm>& log_terms() const { return log_terms_; }
    const std::vector<Row>& equalities() const { return equalities_; }
    const std::vector<Row>& inequalities() const { return inequalities_; }
    const std::vector<SocConstraint>& cones() const { return cones_; }

    /// Full objective (linear + exact log terms) at x.
    double objective_value(const std::vector<double>& x) const;
    /// Largest violation of any stored bound, row, or cone at x (0 when feasible).
    double max_violation(const std::vector<double>& x) const;

    /// Human-readable listing of variables, rows, and cones.
    std::string dump() const;

    static constexpr double kLogFloor = 1e-9;

private:
    void check(const AffineExpr& e) const;

    std::vector<VarBlock> blocks_;
    std::vector<double> lo_, hi_;
    std::vector<std::string> names_;
    std::vector<Row> equalities_;
    std::vector<Row> inequalities_;
    std::vector<SocConstraint> cones_;
    std::vector<LogTerm> log_terms_;
    AffineExpr objective_;
    Sense sense_ = Sense::minimize;
};

}  // namespace dhc::conic
