#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gx {

// Bounded-Lipschitz payoff expressions. Multiplication is restricted to
// constant * expression and capped quadratics come as the builtin
// sqcap(e, K) = min(e^2, K^2), so every expressible payoff carries a
// computable structural Lipschitz constant.

enum class ExprKind { Number, Var, Add, Sub, Mul, Neg, Min, Max, Abs, Clamp, Sqcap };

struct PayoffExpr {
    ExprKind kind;
    double number = 0.0;   // Number nodes and folded literal operands
    std::size_t var = 0;   // Var nodes: zero-based index
    std::vector<std::shared_ptr<const PayoffExpr>> args;
};

using ExprPtr = std::shared_ptr<const PayoffExpr>;

struct ParsedPayoff {
    ExprPtr root;
    std::size_t arity = 0;

    double operator()(std::span<const double> point) const;
    double eval1(double x) const;  // arity-1 convenience
    std::string print() const;
};

// throws ParseError with a byte offset on bad input
ParsedPayoff parse_payoff(const std::string& source, std::size_t arity);

struct Box {
    std::vector<std::pair<double, double>> intervals;  // one per variable
    static Box cube(std::size_t arity, double lo, double hi);
};

struct PayoffCertificate {
    double bound_structural = 0.0;      // interval-arithmetic max |value| over the box
    double lipschitz_structural = 0.0;  // AST composition bound, binding for the solvers
    double bound_sampled = 0.0;         // advisory
    double lipschitz_sampled = 0.0;     // advisory
    Box box;
};

PayoffCertificate certify(const ParsedPayoff& p, const Box& box, int samples = 4000,
                          std::uint64_t seed = 1);

// half-width of the region where the payoff still varies; literal-driven heuristic
double support_hint(const ParsedPayoff& p);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// random bounded-Lipschitz expression for property suites
ParsedPayoff random_payoff(class CounterRng& rng, std::size_t arity, int max_depth = 4);

}  // namespace gx
