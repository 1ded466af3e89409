#include "gexpect/payoff.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "gexpect/errors.hpp"
#include "gexpect/rng.hpp"

namespace gx {

namespace {

ExprPtr make(ExprKind k, std::vector<ExprPtr> args = {}) {
    auto e = std::make_shared<PayoffExpr>();
    e->kind = k;
    e->args = std::move(args);
    return e;
}

ExprPtr make_num(double v) {
    auto e = std::make_shared<PayoffExpr>();
    e->kind = ExprKind::Number;
    e->number = v;
    return e;
}

ExprPtr make_var(std::size_t i) {
    auto e = std::make_shared<PayoffExpr>();
    e->kind = ExprKind::Var;
    e->var = i;
    return e;
}

bool is_constant(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Number: return true;
        case ExprKind::Var: return false;
        default:
            return std::all_of(e->args.begin(), e->args.end(), is_constant);
    }
}

double eval_node(const PayoffExpr& e, std::span<const double> pt) {
    switch (e.kind) {
        case ExprKind::Number: return e.number;
        case ExprKind::Var: return pt[e.var];
        case ExprKind::Add: return eval_node(*e.args[0], pt) + eval_node(*e.args[1], pt);
        case ExprKind::Sub: return eval_node(*e.args[0], pt) - eval_node(*e.args[1], pt);
        case ExprKind::Mul: return eval_node(*e.args[0], pt) * eval_node(*e.args[1], pt);
        case ExprKind::Neg: return -eval_node(*e.args[0], pt);
        case ExprKind::Min:
            return std::min(eval_node(*e.args[0], pt), eval_node(*e.args[1], pt));
        case ExprKind::Max:
            return std::max(eval_node(*e.args[0], pt), eval_node(*e.args[1], pt));
        case ExprKind::Abs: return std::abs(eval_node(*e.args[0], pt));
        case ExprKind::Clamp: {
            const double v = eval_node(*e.args[0], pt);
            return std::clamp(v, e.args[1]->number, e.args[2]->number);
        }
        case ExprKind::Sqcap: {
            const double v = eval_node(*e.args[0], pt);
            const double k = e.args[1]->number;
            return std::min(v * v, k * k);
        }
    }
    return 0.0;
}

double eval_const(const ExprPtr& e) {
    return eval_node(*e, std::span<const double>{});
}

// ---- lexer / parser ------------------------------------------------------

struct Token {
    enum Type { Num, Ident, Plus, Minus, Star, LParen, RParen, Comma, End } type;
    double num = 0.0;
    std::string ident;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::size_t at = pos_;
        if (pos_ >= s_.size()) return {Token::End, 0, "", at};
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                throw ParseError("bad numeric literal", at);
            }
            pos_ += used;
            return {Token::Num, v, "", at};
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
                ++end;
            Token t{Token::Ident, 0, s_.substr(pos_, end - pos_), at};
            pos_ = end;
            return t;
        }
        ++pos_;
        switch (c) {
            case '+': return {Token::Plus, 0, "", at};
            case '-': return {Token::Minus, 0, "", at};
            case '*': return {Token::Star, 0, "", at};
            case '(': return {Token::LParen, 0, "", at};
            case ')': return {Token::RParen, 0, "", at};
            case ',': return {Token::Comma, 0, "", at};
        }
        throw ParseError(std::string("unexpected character '") + c + "'", at);
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    Parser(const std::string& s, std::size_t arity) : lex_(s), arity_(arity) { advance(); }

    ExprPtr parse() {
        ExprPtr e = expr();
        expect(Token::End, "trailing input");
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }

    void expect(Token::Type t, const char* what) {
        if (cur_.type != t) throw ParseError(std::string("expected ") + what, cur_.offset);
        advance();
    }

    ExprPtr expr() {
        ExprPtr e = term();
        while (cur_.type == Token::Plus || cur_.type == Token::Minus) {
            const bool plus = cur_.type == Token::Plus;
            advance();
            e = make(plus ? ExprKind::Add : ExprKind::Sub, {e, term()});
        }
        return e;
    }

    ExprPtr term() {
        ExprPtr e = unary();
        while (cur_.type == Token::Star) {
            const std::size_t at = cur_.offset;
            advance();
            ExprPtr rhs = unary();
            if (!is_constant(e) && !is_constant(rhs))
                throw ParseError("product requires a literal operand", at);
            // fold the constant side to keep the Lipschitz bookkeeping simple
            if (is_constant(e)) e = make_num(eval_const(e));
            if (is_constant(rhs)) rhs = make_num(eval_const(rhs));
            e = make(ExprKind::Mul, {e, rhs});
        }
        return e;
    }

    ExprPtr unary() {
        if (cur_.type == Token::Minus) {
            advance();
            ExprPtr e = unary();
            // fold so that "-3" round-trips as a literal, not a Neg node
            if (e->kind == ExprKind::Number) return make_num(-e->number);
            return make(ExprKind::Neg, {e});
        }
        return primary();
    }

    ExprPtr primary() {
        if (cur_.type == Token::Num) {
            const double v = cur_.num;
            advance();
            return make_num(v);
        }
        if (cur_.type == Token::LParen) {
            advance();
            ExprPtr e = expr();
            expect(Token::RParen, "')'");
            return e;
        }
        if (cur_.type != Token::Ident)
            throw ParseError("expected expression", cur_.offset);
        const std::string name = cur_.ident;
        const std::size_t at = cur_.offset;
        advance();
        if (name.size() >= 2 && name[0] == 'x' &&
            std::all_of(name.begin() + 1, name.end(),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            const std::size_t idx = std::stoul(name.substr(1));
            if (idx == 0 || idx > arity_)
                throw ParseError("variable " + name + " exceeds arity " +
                                 std::to_string(arity_), at);
            return make_var(idx - 1);
        }
        if (cur_.type != Token::LParen)
            throw ParseError("unknown identifier '" + name + "'", at);
        advance();
        std::vector<ExprPtr> args;
        if (cur_.type != Token::RParen) {
            args.push_back(expr());
            while (cur_.type == Token::Comma) {
                advance();
                args.push_back(expr());
            }
        }
        expect(Token::RParen, "')'");
        return call(name, std::move(args), at);
    }

    ExprPtr call(const std::string& name, std::vector<ExprPtr> args, std::size_t at) {
        auto need = [&](std::size_t n) {
            if (args.size() != n)
                throw ParseError(name + " takes " + std::to_string(n) + " arguments", at);
        };
        if (name == "min") { need(2); return make(ExprKind::Min, std::move(args)); }
        if (name == "max") { need(2); return make(ExprKind::Max, std::move(args)); }
        if (name == "abs") { need(1); return make(ExprKind::Abs, std::move(args)); }
        if (name == "neg") { need(1); return make(ExprKind::Neg, std::move(args)); }
        if (name == "clamp") {
            need(3);
            if (!is_constant(args[1]) || !is_constant(args[2]))
                throw ParseError("clamp bounds must be literals", at);
            args[1] = make_num(eval_const(args[1]));
            args[2] = make_num(eval_const(args[2]));
            if (args[1]->number > args[2]->number)
                throw ParseError("clamp bounds out of order", at);
            return make(ExprKind::Clamp, std::move(args));
        }
        if (name == "sqcap") {
            need(2);
            if (!is_constant(args[1]))
                throw ParseError("sqcap cap must be a literal", at);
            args[1] = make_num(std::abs(eval_const(args[1])));
            return make(ExprKind::Sqcap, std::move(args));
        }
        throw ParseError("unknown function '" + name + "'", at);
    }

    Lexer lex_;
    Token cur_;
    std::size_t arity_;
};

// ---- printing ------------------------------------------------------------

void print_node(const PayoffExpr& e, std::ostream& os) {
    auto bin = [&](const char* op) {
        os << "(";
        print_node(*e.args[0], os);
        os << " " << op << " ";
        print_node(*e.args[1], os);
        os << ")";
    };
    switch (e.kind) {
        case ExprKind::Number: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << e.number;
            os << tmp.str();
            break;
        }
        case ExprKind::Var: os << "x" << (e.var + 1); break;
        case ExprKind::Add: bin("+"); break;
        case ExprKind::Sub: bin("-"); break;
        case ExprKind::Mul: bin("*"); break;
        case ExprKind::Neg:
            os << "neg(";
            print_node(*e.args[0], os);
            os << ")";
            break;
        case ExprKind::Min:
        case ExprKind::Max:
            os << (e.kind == ExprKind::Min ? "min(" : "max(");
            print_node(*e.args[0], os);
            os << ", ";
            print_node(*e.args[1], os);
            os << ")";
            break;
        case ExprKind::Abs:
            os << "abs(";
            print_node(*e.args[0], os);
            os << ")";
            break;
        case ExprKind::Clamp:
            os << "clamp(";
            print_node(*e.args[0], os);
            os << ", ";
            print_node(*e.args[1], os);
            os << ", ";
            print_node(*e.args[2], os);
            os << ")";
            break;
        case ExprKind::Sqcap:
            os << "sqcap(";
            print_node(*e.args[0], os);
            os << ", ";
            print_node(*e.args[1], os);
            os << ")";
            break;
    }
}

// ---- structural certificate ----------------------------------------------

struct NodeCert {
    double lo, hi, lip;
};

NodeCert cert_node(const PayoffExpr& e, const Box& box) {
    switch (e.kind) {
        case ExprKind::Number: return {e.number, e.number, 0.0};
        case ExprKind::Var: {
            const auto& iv = box.intervals[e.var];
            return {iv.first, iv.second, 1.0};
        }
        case ExprKind::Add: {
            const auto a = cert_node(*e.args[0], box), b = cert_node(*e.args[1], box);
            return {a.lo + b.lo, a.hi + b.hi, a.lip + b.lip};
        }
        case ExprKind::Sub: {
            const auto a = cert_node(*e.args[0], box), b = cert_node(*e.args[1], box);
            return {a.lo - b.hi, a.hi - b.lo, a.lip + b.lip};
        }
        case ExprKind::Mul: {
            const auto a = cert_node(*e.args[0], box), b = cert_node(*e.args[1], box);
            const double c0 = a.lo * b.lo, c1 = a.lo * b.hi, c2 = a.hi * b.lo,
                         c3 = a.hi * b.hi;
            // one side is a folded literal, so lip of that side is 0
            const double scale_a = std::max(std::abs(a.lo), std::abs(a.hi));
            const double scale_b = std::max(std::abs(b.lo), std::abs(b.hi));
            return {std::min(std::min(c0, c1), std::min(c2, c3)),
                    std::max(std::max(c0, c1), std::max(c2, c3)),
                    a.lip * scale_b + b.lip * scale_a};
        }
        case ExprKind::Neg: {
            const auto a = cert_node(*e.args[0], box);
            return {-a.hi, -a.lo, a.lip};
        }
        case ExprKind::Min: {
            const auto a = cert_node(*e.args[0], box), b = cert_node(*e.args[1], box);
            return {std::min(a.lo, b.lo), std::min(a.hi, b.hi), std::max(a.lip, b.lip)};
        }
        case ExprKind::Max: {
            const auto a = cert_node(*e.args[0], box), b = cert_node(*e.args[1], box);
            return {std::max(a.lo, b.lo), std::max(a.hi, b.hi), std::max(a.lip, b.lip)};
        }
        case ExprKind::Abs: {
            const auto a = cert_node(*e.args[0], box);
            const double lo = (a.lo <= 0.0 && a.hi >= 0.0) ? 0.0
                                                           : std::min(std::abs(a.lo), std::abs(a.hi));
            return {lo, std::max(std::abs(a.lo), std::abs(a.hi)), a.lip};
        }
        case ExprKind::Clamp: {
            const auto a = cert_node(*e.args[0], box);
            const double lo = e.args[1]->number, hi = e.args[2]->number;
            return {std::clamp(a.lo, lo, hi), std::clamp(a.hi, lo, hi), a.lip};
        }
        case ExprKind::Sqcap: {
            const auto a = cert_node(*e.args[0], box);
            const double k = e.args[1]->number;
            const double m = std::max(std::abs(a.lo), std::abs(a.hi));
            const double lo = (a.lo <= 0.0 && a.hi >= 0.0)
                                  ? 0.0
                                  : std::min(a.lo * a.lo, a.hi * a.hi);
            return {std::min(lo, k * k), std::min(m * m, k * k), 2.0 * k * a.lip};
        }
    }
    return {0, 0, 0};
}

void collect_literal_scale(const PayoffExpr& e, double& scale) {
    if (e.kind == ExprKind::Number) scale = std::max(scale, std::abs(e.number));
    for (const auto& a : e.args) collect_literal_scale(*a, scale);
}

}  // namespace

double ParsedPayoff::operator()(std::span<const double> point) const {
    if (point.size() != arity) throw InputError("payoff arity mismatch");
    return eval_node(*root, point);
}

double ParsedPayoff::eval1(double x) const {
    const double pt[1] = {x};
    if (arity != 1) throw InputError("payoff arity mismatch");
    return eval_node(*root, pt);
}

std::string ParsedPayoff::print() const {
    std::ostringstream os;
    print_node(*root, os);
    return os.str();
}

ParsedPayoff parse_payoff(const std::string& source, std::size_t arity) {
    Parser p(source, arity);
    return ParsedPayoff{p.parse(), arity};
}

Box Box::cube(std::size_t arity, double lo, double hi) {
    Box b;
    b.intervals.assign(arity, {lo, hi});
    return b;
}

PayoffCertificate certify(const ParsedPayoff& p, const Box& box, int samples,
                          std::uint64_t seed) {
    if (box.intervals.size() != p.arity) throw InputError("certificate box arity mismatch");
    PayoffCertificate c;
    c.box = box;
    const NodeCert nc = cert_node(*p.root, box);
    c.bound_structural = std::max(std::abs(nc.lo), std::abs(nc.hi));
    c.lipschitz_structural = nc.lip;

    CounterRng rng(seed, 0xCE47);
    std::vector<double> pt(p.arity), pt2(p.arity);
    auto sample_point = [&](std::vector<double>& dst) {
        for (std::size_t i = 0; i < p.arity; ++i)
            dst[i] = rng.next_uniform(box.intervals[i].first, box.intervals[i].second);
    };
    for (int s = 0; s < samples; ++s) {
        sample_point(pt);
        const double v = p(pt);
        c.bound_sampled = std::max(c.bound_sampled, std::abs(v));
        // nearby pair for the difference quotient
        double dist2 = 0.0;
        for (std::size_t i = 0; i < p.arity; ++i) {
            const double w = box.intervals[i].second - box.intervals[i].first;
            pt2[i] = std::clamp(pt[i] + rng.next_uniform(-1e-3, 1e-3) * w,
                                box.intervals[i].first, box.intervals[i].second);
            dist2 += (pt2[i] - pt[i]) * (pt2[i] - pt[i]);
        }
        const double dist = std::sqrt(dist2);
        if (dist > 0.0)
            c.lipschitz_sampled = std::max(c.lipschitz_sampled, std::abs(p(pt2) - v) / dist);
    }
    return c;
}

double support_hint(const ParsedPayoff& p) {
    double scale = 0.0;
    collect_literal_scale(*p.root, scale);
    return std::max(scale, 1.0);
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
    if (a->kind == ExprKind::Number && a->number != b->number) return false;
    if (a->kind == ExprKind::Var && a->var != b->var) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!structurally_equal(a->args[i], b->args[i])) return false;
    return true;
}

ParsedPayoff random_payoff(CounterRng& rng, std::size_t arity, int max_depth) {
    // build bottom-up; every generated tree is bounded Lipschitz by construction
    std::function<ExprPtr(int)> gen = [&](int depth) -> ExprPtr {
        if (depth <= 0) {
            if (rng.next_uniform() < 0.5) {
                ExprPtr v = make_var(rng.next_below(arity));
                const double k = rng.next_uniform(1.0, 6.0);
                return make(ExprKind::Clamp, {v, make_num(-k), make_num(k)});
            }
            return make_num(rng.next_uniform(-3.0, 3.0));
        }
        switch (rng.next_below(7)) {
            case 0: return make(ExprKind::Add, {gen(depth - 1), gen(depth - 1)});
            case 1: return make(ExprKind::Sub, {gen(depth - 1), gen(depth - 1)});
            case 2: return make(ExprKind::Min, {gen(depth - 1), gen(depth - 1)});
            case 3: return make(ExprKind::Max, {gen(depth - 1), gen(depth - 1)});
            case 4: return make(ExprKind::Abs, {gen(depth - 1)});
            case 5:
                return make(ExprKind::Mul,
                            {make_num(rng.next_uniform(-2.0, 2.0)), gen(depth - 1)});
            default: {
                ExprPtr v = make_var(rng.next_below(arity));
                return make(ExprKind::Sqcap, {v, make_num(rng.next_uniform(1.0, 5.0))});
            }
        }
    };
    // round through the parser so generated trees are in its folded normal form
    const ParsedPayoff raw{gen(max_depth), arity};
    return parse_payoff(raw.print(), arity);
}

}  // namespace gx
