#include "wdvv/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wdvv/errors.hpp"

namespace wdvv {

Expr Expr::make(Kind k, std::vector<Expr> args, double exponent) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->args = std::move(args);
  n->exponent = exponent;
  return Expr(std::move(n));
}

Expr Expr::var(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::var;
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::constant(Scalar value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  return Expr(std::move(n));
}

std::size_t Expr::arity() const {
  switch (kind()) {
    case Kind::var: return var_index() + 1;
    case Kind::constant: return 0;
    default: {
      std::size_t a = 0;
      for (const auto& c : node_->args) a = std::max(a, c.arity());
      return a;
    }
  }
}

std::string Expr::to_string() const {
  std::ostringstream os;
  switch (kind()) {
    case Kind::var: os << "x" << var_index(); break;
    case Kind::constant:
      if (const_value().imag() == 0.0) {
        os << const_value().real();
      } else {
        os << "(" << const_value().real() << (const_value().imag() < 0 ? "" : "+") << const_value().imag() << "i)";
      }
      break;
    case Kind::add: os << "(" << lhs().to_string() << " + " << rhs().to_string() << ")"; break;
    case Kind::mul: os << lhs().to_string() << "*" << rhs().to_string(); break;
    case Kind::pow: os << "(" << arg().to_string() << ")^" << exponent(); break;
    case Kind::log: os << "log(" << arg().to_string() << ")"; break;
    case Kind::exp: os << "exp(" << arg().to_string() << ")"; break;
  }
  return os.str();
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(Expr::Kind::add, {a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(Expr::Kind::mul, {a, b}); }
Expr operator-(const Expr& a) { return Expr::constant(-1.0) * a; }
Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
Expr operator/(const Expr& a, const Expr& b) { return a * pow(b, -1.0); }
Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
Expr operator-(const Expr& a, double b) { return a + Expr::constant(-b); }
Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
Expr operator/(const Expr& a, double b) { return a * Expr::constant(1.0 / b); }
Expr operator/(double a, const Expr& b) { return Expr::constant(a) * pow(b, -1.0); }
Expr pow(const Expr& a, double r) { return Expr::make(Expr::Kind::pow, {a}, r); }
Expr log(const Expr& a) { return Expr::make(Expr::Kind::log, {a}); }
Expr exp(const Expr& a) { return Expr::make(Expr::Kind::exp, {a}); }

namespace {

struct JetEvaluator {
  std::span<const Scalar> point;
  std::size_t order;
  const JetOptions& opts;
  std::string path;

  Jet run(const Expr& e) {
    switch (e.kind()) {
      case Expr::Kind::var:
        if (e.var_index() >= point.size()) {
          throw ShapeError("variable x" + std::to_string(e.var_index()) + " at " + where() + " but point has " +
                           std::to_string(point.size()) + " coordinates");
        }
        return Jet::variable(e.var_index(), point[e.var_index()], point.size(), order);
      case Expr::Kind::constant: return Jet::constant(e.const_value(), point.size(), order);
      case Expr::Kind::add: return child(e.lhs(), "add[0]") + child(e.rhs(), "add[1]");
      case Expr::Kind::mul: return child(e.lhs(), "mul[0]") * child(e.rhs(), "mul[1]");
      case Expr::Kind::pow: return guarded([&](const Jet& a) { return pow(a, e.exponent(), opts); }, e.arg(), "pow");
      case Expr::Kind::log: return guarded([&](const Jet& a) { return log(a, opts); }, e.arg(), "log");
      case Expr::Kind::exp: return exp(child(e.arg(), "exp"));
    }
    throw ShapeError("unknown expression node");
  }

  std::string where() const { return path.empty() ? "/" : path; }

  Jet child(const Expr& e, const char* tag) {
    const std::size_t saved = path.size();
    path += "/";
    path += tag;
    Jet r = run(e);
    path.resize(saved);
    return r;
  }

  template <class F>
  Jet guarded(F&& f, const Expr& arg, const char* tag) {
    Jet a = child(arg, tag);
    try {
      return f(a);
    } catch (const DomainError& err) {
      throw DomainError(std::string(err.what()) + " at node " + path + "/" + tag);
    }
  }
};

struct ScalarEvaluator {
  std::span<const Scalar> point;
  const JetOptions& opts;

  Scalar run(const Expr& e) const {
    switch (e.kind()) {
      case Expr::Kind::var:
        if (e.var_index() >= point.size()) throw ShapeError("variable index exceeds point dimension");
        return point[e.var_index()];
      case Expr::Kind::constant: return e.const_value();
      case Expr::Kind::add: return run(e.lhs()) + run(e.rhs());
      case Expr::Kind::mul: return run(e.lhs()) * run(e.rhs());
      case Expr::Kind::pow: {
        const Scalar a = run(e.arg());
        const double r = e.exponent();
        if (r == std::round(r)) {
          if (a == Scalar{} && r < 0) throw DomainError("negative power of zero");
          Scalar out = 1.0;
          const Scalar base = r < 0 ? 1.0 / a : a;
          for (long long k = 0; k < std::llabs(static_cast<long long>(r)); ++k) out *= base;
          return out;
        }
        if (near_branch_cut(a, opts.branch_cut_margin)) throw DomainError("pow argument on branch cut");
        return std::exp(r * std::log(a));
      }
      case Expr::Kind::log: {
        const Scalar a = run(e.arg());
        if (near_branch_cut(a, opts.branch_cut_margin)) throw DomainError("log argument on branch cut");
        return std::log(a);
      }
      case Expr::Kind::exp: return std::exp(run(e.arg()));
    }
    throw ShapeError("unknown expression node");
  }
};

}  // namespace

Jet eval_expr(const Expr& e, std::span<const Scalar> point, std::size_t order, const JetOptions& opts) {
  if (point.empty()) throw ShapeError("evaluation point must have at least one coordinate");
  JetEvaluator ev{point, order, opts, {}};
  return ev.run(e);
}

Jet eval_expr(const Expr& e, std::span<const double> point, std::size_t order, const JetOptions& opts) {
  std::vector<Scalar> p(point.begin(), point.end());
  return eval_expr(e, std::span<const Scalar>(p), order, opts);
}

Scalar eval_scalar(const Expr& e, std::span<const Scalar> point, const JetOptions& opts) {
  return ScalarEvaluator{point, opts}.run(e);
}

}  // namespace wdvv
