#include "weakot/costs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace weakot {

namespace detail {

struct CostNode {
    virtual ~CostNode() = default;
    virtual double eval(double t) const = 0;
    virtual double deriv_right(double t) const = 0;
    virtual double inverse(double y) const = 0;
    virtual std::string spec() const = 0;
};

namespace {

double fast_pow(double t, double p) {
    if (p == 2.0) return t * t;
    if (p == 1.0) return t;
    if (p == 1.5) return t * std::sqrt(t);
    if (p == 3.0) return t * t * t;
    if (p == 4.0) return (t * t) * (t * t);
    return std::pow(t, p);
}

/// inf{t >= 0 : f(t) >= y} for non-decreasing unbounded f, y > 0.
template <typename F> double bisect_inverse(const F& f, double y) {
    double hi = 1.0;
    while (f(hi) < y) {
        hi *= 2.0;
        if (hi > 1e300) throw std::domain_error("inverse: cost does not reach target");
    }
    double lo = 0.0;
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= y) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

struct PowerNode final : CostNode {
    double p;
    explicit PowerNode(double p_) : p(p_) {}
    double eval(double t) const override { return fast_pow(t, p); }
    double deriv_right(double t) const override {
        if (p == 1.0) return 1.0;
        return t == 0.0 ? 0.0 : p * fast_pow(t, p - 1.0);
    }
    double inverse(double y) const override { return std::pow(y, 1.0 / p); }
    std::string spec() const override { return "power:p=" + fmt(p); }
};

struct QuadLinNode final : CostNode {
    double t0;
    explicit QuadLinNode(double t0_) : t0(t0_) {}
    double eval(double t) const override {
        return t <= t0 ? t * t : 2.0 * t * t0 - t0 * t0;
    }
    double deriv_right(double t) const override { return 2.0 * std::min(t, t0); }
    double inverse(double y) const override {
        return y <= t0 * t0 ? std::sqrt(y) : (y + t0 * t0) / (2.0 * t0);
    }
    std::string spec() const override { return "quadlin:t0=" + fmt(t0); }
};

/// base(t) = t^2 + (t - t0)_+^p: quadratic on [0,t0], strictly above t^2 beyond.
struct QuadBasePowerNode final : CostNode {
    double t0, p;
    QuadBasePowerNode(double t0_, double p_) : t0(t0_), p(p_) {}
    double eval(double t) const override {
        return t <= t0 ? t * t : t * t + fast_pow(t - t0, p);
    }
    double deriv_right(double t) const override {
        if (t <= t0) return 2.0 * t + (p == 1.0 && t == t0 ? 1.0 : 0.0);
        return 2.0 * t + p * fast_pow(t - t0, p - 1.0);
    }
    double inverse(double y) const override {
        if (y <= t0 * t0) return std::sqrt(y);
        return bisect_inverse([this](double t) { return eval(t); }, y);
    }
    std::string spec() const override {
        return "quadbase:t0=" + fmt(t0) + ",p=" + fmt(p);
    }
};

struct QuadExcessNode final : CostNode {
    CostFunction base;
    double t0;
    bool from_grammar; ///< built from (t0, p); spec prints the grammar form
    double grammar_p = 0.0;

    QuadExcessNode(CostFunction base_, double t0_, bool from_grammar_, double p_)
        : base(std::move(base_)), t0(t0_), from_grammar(from_grammar_), grammar_p(p_) {}

    double eval(double t) const override { return std::max(base(t) - t * t, 0.0); }
    double deriv_right(double t) const override {
        if (t < t0) return 0.0;
        return std::max(base.deriv_right(t) - 2.0 * t, 0.0);
    }
    // Shifted inverse of the base, not the generalized inverse of the excess.
    double inverse(double y) const override { return base.inverse(y + t0 * t0); }
    std::string spec() const override {
        if (from_grammar) return "quadexcess:t0=" + fmt(t0) + ",p=" + fmt(grammar_p);
        return "quadexcess_of:t0=" + fmt(t0) + "(" + base.spec() + ")";
    }
};

struct CappedQuadNode final : CostNode {
    double D, l0;
    CappedQuadNode(double D_, double l0_) : D(D_), l0(l0_) {}
    double eval(double t) const override {
        return t <= l0 * D ? t * t / (2.0 * D) : l0 * t - l0 * l0 * D / 2.0;
    }
    double deriv_right(double t) const override { return std::min(t / D, l0); }
    double inverse(double y) const override {
        const double knee = l0 * l0 * D / 2.0;
        return y <= knee ? std::sqrt(2.0 * D * y) : (y + knee) / l0;
    }
    std::string spec() const override { return "alpha:D=" + fmt(D) + ",l0=" + fmt(l0); }
};

struct ScaledNode final : CostNode {
    CostFunction inner;
    double a;
    ScaledNode(CostFunction inner_, double a_) : inner(std::move(inner_)), a(a_) {}
    double eval(double t) const override { return inner(a * t); }
    double deriv_right(double t) const override { return a * inner.deriv_right(a * t); }
    double inverse(double y) const override { return inner.inverse(y) / a; }
    std::string spec() const override {
        return "scale:a=" + fmt(a) + "(" + inner.spec() + ")";
    }
};

struct SumNode final : CostNode {
    CostFunction lhs, rhs;
    SumNode(CostFunction l, CostFunction r) : lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(double t) const override { return lhs(t) + rhs(t); }
    double deriv_right(double t) const override {
        return lhs.deriv_right(t) + rhs.deriv_right(t);
    }
    double inverse(double y) const override {
        return bisect_inverse([this](double t) { return eval(t); }, y);
    }
    std::string spec() const override { return "sum(" + lhs.spec() + ";" + rhs.spec() + ")"; }
};

} // namespace detail

CostFunction::CostFunction(std::shared_ptr<const detail::CostNode> node)
    : node_(std::move(node)) {}

double CostFunction::operator()(double t) const {
    if (t < 0.0) throw std::domain_error("cost: negative argument");
    return node_->eval(t);
}

double CostFunction::deriv_right(double t) const {
    if (t < 0.0) throw std::domain_error("cost: negative argument");
    return node_->deriv_right(t);
}

double CostFunction::inverse(double y) const {
    if (!(y > 0.0)) throw std::domain_error("cost inverse: y must be positive");
    return node_->inverse(y);
}

std::string CostFunction::spec() const { return node_->spec(); }

CostFunction CostFunction::power(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("power: non-convex, requires p >= 1");
    return CostFunction(std::make_shared<detail::PowerNode>(p));
}

CostFunction CostFunction::quad_lin(double t0) {
    if (!(t0 > 0.0)) throw std::invalid_argument("quadlin: requires t0 > 0");
    return CostFunction(std::make_shared<detail::QuadLinNode>(t0));
}

CostFunction CostFunction::quad_excess(double t0, double p) {
    if (!(t0 > 0.0)) throw std::invalid_argument("quadexcess: requires t0 > 0");
    if (!(p >= 1.0)) throw std::invalid_argument("quadexcess: non-convex, requires p >= 1");
    CostFunction base(std::make_shared<detail::QuadBasePowerNode>(t0, p));
    return CostFunction(
        std::make_shared<detail::QuadExcessNode>(std::move(base), t0, true, p));
}

CostFunction CostFunction::quad_excess_of(CostFunction base, double t0) {
    if (!(t0 > 0.0)) throw std::invalid_argument("quadexcess: requires t0 > 0");
    if (!is_quadratic_near_zero(base, t0))
        throw std::invalid_argument("quadexcess: base is not quadratic on [0,t0]");
    return CostFunction(
        std::make_shared<detail::QuadExcessNode>(std::move(base), t0, false, 0.0));
}

CostFunction CostFunction::capped_quad(double D, double l0) {
    if (!(D > 0.0)) throw std::invalid_argument("alpha: requires D > 0");
    if (!(l0 > 0.0)) throw std::invalid_argument("alpha: requires l0 > 0");
    return CostFunction(std::make_shared<detail::CappedQuadNode>(D, l0));
}

CostFunction CostFunction::scaled(CostFunction inner, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("scale: requires a > 0");
    return CostFunction(std::make_shared<detail::ScaledNode>(std::move(inner), a));
}

CostFunction CostFunction::sum(CostFunction lhs, CostFunction rhs) {
    return CostFunction(std::make_shared<detail::SumNode>(std::move(lhs), std::move(rhs)));
}

bool is_quadratic_near_zero(const CostFunction& theta, double t0) {
    const double slack = 1e-9 * std::max(1.0, t0 * t0);
    for (int k = 0; k <= 256; ++k) {
        const double t = t0 * static_cast<double>(k) / 256.0;
        if (std::abs(theta(t) - t * t) > slack) return false;
    }
    return true;
}

// ---------------------------------------------------------------------
// Grammar parser (recursive descent).

namespace {

class ThetaParser {
  public:
    explicit ThetaParser(const std::string& text) : text_(text) {}

    CostFunction parse() {
        CostFunction f = parse_spec();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return f;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "theta spec parse error at position " << pos_ << ": " << what;
        throw std::invalid_argument(os.str());
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool try_consume(const std::string& tok) {
        skip_ws();
        if (text_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(const std::string& tok) {
        if (!try_consume(tok)) fail("expected '" + tok + "'");
    }

    double number() {
        skip_ws();
        const char* start = text_.c_str() + pos_;
        char* end = nullptr;
        const double x = std::strtod(start, &end);
        if (end == start) fail("expected a number");
        pos_ += static_cast<std::size_t>(end - start);
        return x;
    }

    CostFunction parse_spec() {
        if (try_consume("power:p=")) return CostFunction::power(number());
        if (try_consume("quadlin:t0=")) return CostFunction::quad_lin(number());
        if (try_consume("quadexcess:t0=")) {
            const double t0 = number();
            expect(",p=");
            return CostFunction::quad_excess(t0, number());
        }
        if (try_consume("alpha:D=")) {
            const double D = number();
            expect(",l0=");
            return CostFunction::capped_quad(D, number());
        }
        if (try_consume("scale:a=")) {
            const double a = number();
            expect("(");
            CostFunction inner = parse_spec();
            expect(")");
            return CostFunction::scaled(std::move(inner), a);
        }
        if (try_consume("sum(")) {
            CostFunction acc = parse_spec();
            expect(";");
            acc = CostFunction::sum(std::move(acc), parse_spec());
            while (try_consume(";")) acc = CostFunction::sum(std::move(acc), parse_spec());
            expect(")");
            return acc;
        }
        fail("expected one of power/quadlin/quadexcess/alpha/scale/sum");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

} // namespace

CostFunction parse_theta(const std::string& spec) { return ThetaParser(spec).parse(); }

} // namespace weakot
