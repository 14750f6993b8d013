#include "wdvv/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "wdvv/errors.hpp"

namespace wdvv {

MultiIndex MultiIndex::unit(std::size_t nvars, std::size_t var) {
  std::vector<unsigned> e(nvars, 0);
  e.at(var) = 1;
  return MultiIndex(std::move(e));
}

unsigned MultiIndex::degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0u); }

double MultiIndex::factorial() const {
  double f = 1.0;
  for (unsigned e : exps_) {
    for (unsigned k = 2; k <= e; ++k) f *= k;
  }
  return f;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.size() != size()) throw ShapeError("multi-index length mismatch");
  std::vector<unsigned> e(exps_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exps_[i];
  return MultiIndex(std::move(e));
}

std::string MultiIndex::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(exps_[i]);
  }
  return s + "]";
}

// ---------------------------------------------------------------------------
// Layout

namespace {

void enumerate_degree(std::size_t nvars, unsigned degree, std::vector<unsigned>& cur, std::size_t pos,
                      std::vector<MultiIndex>& out) {
  if (pos + 1 == nvars) {
    cur[pos] = degree;
    out.emplace_back(cur);
    return;
  }
  for (unsigned e = degree + 1; e-- > 0;) {
    cur[pos] = e;
    enumerate_degree(nvars, degree - e, cur, pos + 1, out);
  }
}

}  // namespace

JetLayout::JetLayout(std::size_t nvars, std::size_t order) : nvars_(nvars), order_(order) {
  if (nvars == 0) throw ShapeError("jet layout needs at least one variable");
  std::vector<unsigned> cur(nvars, 0);
  for (unsigned d = 0; d <= order; ++d) enumerate_degree(nvars, d, cur, 0, monomials_);
  degrees_.reserve(monomials_.size());
  for (const auto& m : monomials_) degrees_.push_back(m.degree());

  lookup_.reserve(monomials_.size());
  for (std::size_t k = 0; k < monomials_.size(); ++k) lookup_.emplace_back(encode(monomials_[k]), k);
  std::sort(lookup_.begin(), lookup_.end());

  raised_.assign(monomials_.size() * nvars_, npos);
  for (std::size_t k = 0; k < monomials_.size(); ++k) {
    if (degrees_[k] == order_) continue;
    for (std::size_t v = 0; v < nvars_; ++v) {
      raised_[k * nvars_ + v] = index_of(monomials_[k] + MultiIndex::unit(nvars_, v));
    }
  }

  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    for (std::size_t j = 0; j < monomials_.size(); ++j) {
      if (degrees_[i] + degrees_[j] > order_) continue;
      products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           static_cast<std::uint32_t>(index_of(monomials_[i] + monomials_[j]))});
    }
  }
}

std::uint64_t JetLayout::encode(const MultiIndex& m) const {
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < m.size(); ++i) code = code * (order_ + 1) + m[i];
  return code;
}

std::size_t JetLayout::index_of(const MultiIndex& m) const {
  if (m.size() != nvars_) throw ShapeError("multi-index has " + std::to_string(m.size()) +
                                           " entries, layout has " + std::to_string(nvars_) + " variables");
  if (m.degree() > order_) return npos;
  const std::uint64_t code = encode(m);
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::make_pair(code, std::size_t{0}));
  if (it == lookup_.end() || it->first != code) return npos;
  return it->second;
}

std::shared_ptr<const JetLayout> JetLayout::get(std::size_t nvars, std::size_t order) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = std::make_shared<const JetLayout>(nvars, order);
  return slot;
}

// ---------------------------------------------------------------------------
// Jet

Jet::Jet(std::shared_ptr<const JetLayout> layout, std::vector<Scalar> coeffs)
    : layout_(std::move(layout)), coeffs_(std::move(coeffs)) {
  if (!layout_) throw ShapeError("jet without layout");
  if (coeffs_.size() != layout_->size()) throw ShapeError("jet coefficient count does not match layout");
}

Jet Jet::constant(Scalar value, std::shared_ptr<const JetLayout> layout) {
  std::vector<Scalar> c(layout->size(), Scalar{});
  c[0] = value;
  return Jet(std::move(layout), std::move(c));
}

Jet Jet::constant(Scalar value, std::size_t nvars, std::size_t order) {
  return constant(value, JetLayout::get(nvars, order));
}

Jet Jet::variable(std::size_t index, Scalar value, std::size_t nvars, std::size_t order) {
  if (index >= nvars) {
    throw ShapeError("variable index " + std::to_string(index) + " out of range for " + std::to_string(nvars) +
                     " variables");
  }
  Jet j = constant(value, nvars, order);
  if (order >= 1) j.coeffs_[j.layout_->index_of(MultiIndex::unit(nvars, index))] = 1.0;
  return j;
}

Scalar Jet::coeff(const MultiIndex& m) const {
  const std::size_t k = layout_->index_of(m);
  return k == JetLayout::npos ? Scalar{} : coeffs_[k];
}

Scalar Jet::partial(const MultiIndex& m) const {
  if (m.degree() > order()) {
    throw ShapeError("partial of order " + std::to_string(m.degree()) + " requested from a jet of order " +
                     std::to_string(order()));
  }
  return coeff(m) * m.factorial();
}

Jet Jet::derivative(std::size_t var) const {
  if (var >= nvars()) throw ShapeError("derivative variable out of range");
  if (order() == 0) throw ShapeError("cannot differentiate an order-0 jet");
  auto out_layout = JetLayout::get(nvars(), order() - 1);
  std::vector<Scalar> c(out_layout->size());
  for (std::size_t k = 0; k < out_layout->size(); ++k) {
    const auto& m = out_layout->monomial(k);
    const std::size_t src = layout_->raised(layout_->index_of(m), var);
    c[k] = coeffs_[src] * static_cast<double>(m[var] + 1);
  }
  return Jet(std::move(out_layout), std::move(c));
}

Jet Jet::truncated(std::size_t new_order) const {
  if (new_order > order()) throw ShapeError("cannot raise the order of a jet by truncation");
  auto out_layout = JetLayout::get(nvars(), new_order);
  // graded enumeration: the lower-order layout is a prefix
  std::vector<Scalar> c(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(out_layout->size()));
  return Jet(std::move(out_layout), std::move(c));
}

Jet Jet::with_value(Scalar v) const {
  Jet j = *this;
  j.coeffs_[0] = v;
  return j;
}

void Jet::require_same_layout(const Jet& b, const char* op) const {
  if (layout_ != b.layout_) {
    throw ShapeError(std::string("jet ") + op + ": layouts differ (" + std::to_string(nvars()) + " vars/order " +
                     std::to_string(order()) + " vs " + std::to_string(b.nvars()) + "/" +
                     std::to_string(b.order()) + ")");
  }
}

Jet& Jet::operator+=(const Jet& b) {
  require_same_layout(b, "add");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += b.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& b) {
  require_same_layout(b, "sub");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= b.coeffs_[k];
  return *this;
}

Jet& Jet::operator*=(const Jet& b) {
  require_same_layout(b, "mul");
  std::vector<Scalar> c(coeffs_.size(), Scalar{});
  for (const auto& p : layout_->products()) c[p.out] += coeffs_[p.lhs] * b.coeffs_[p.rhs];
  coeffs_ = std::move(c);
  return *this;
}

Jet& Jet::operator/=(const Jet& b) {
  require_same_layout(b, "div");
  return *this *= reciprocal(b);
}

Jet& Jet::operator+=(Scalar b) {
  coeffs_[0] += b;
  return *this;
}
Jet& Jet::operator-=(Scalar b) {
  coeffs_[0] -= b;
  return *this;
}
Jet& Jet::operator*=(Scalar b) {
  for (auto& c : coeffs_) c *= b;
  return *this;
}
Jet& Jet::operator/=(Scalar b) {
  if (b == Scalar{}) throw DomainError("jet division by zero scalar");
  for (auto& c : coeffs_) c /= b;
  return *this;
}

Jet Jet::operator-() const {
  Jet j = *this;
  for (auto& c : j.coeffs_) c = -c;
  return j;
}

double Jet::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(const Jet& a, const Jet& b) {
  Jet r = a;
  return r *= b;
}
Jet operator/(const Jet& a, const Jet& b) {
  Jet r = a;
  return r /= b;
}
Jet operator+(Jet a, Scalar b) { return a += b; }
Jet operator+(Scalar a, Jet b) { return b += a; }
Jet operator-(Jet a, Scalar b) { return a -= b; }
Jet operator-(Scalar a, const Jet& b) { return (-b) += a; }
Jet operator*(Jet a, Scalar b) { return a *= b; }
Jet operator*(Scalar a, Jet b) { return b *= a; }
Jet operator/(Jet a, Scalar b) { return a /= b; }
Jet operator/(Scalar a, const Jet& b) { return reciprocal(b) *= a; }

// ---------------------------------------------------------------------------
// Univariate composition

namespace {

/// Evaluate sum_k series[k] * t^k where t = a - a(p) is nilpotent.
Jet compose(const Jet& a, std::span<const Scalar> series) {
  Jet t = a.with_value(Scalar{});
  Jet result = Jet::constant(series[0], a.layout());
  Jet power = Jet::constant(1.0, a.layout());
  for (std::size_t k = 1; k < series.size() && k <= a.order(); ++k) {
    power *= t;
    result += power * series[k];
  }
  return result;
}

bool is_integer(double r) { return std::isfinite(r) && r == std::round(r) && std::abs(r) < 1e9; }

void check_cut(Scalar z, const JetOptions& opts, const char* what) {
  if (near_branch_cut(z, opts.branch_cut_margin)) {
    throw DomainError(std::string(what) + " argument (" + std::to_string(z.real()) + "," + std::to_string(z.imag()) +
                      ") lies on the principal branch cut");
  }
}

Jet integer_power(const Jet& a, long long n) {
  if (n < 0) return integer_power(reciprocal(a), -n);
  Jet result = Jet::constant(1.0, a.layout());
  Jet base = a;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

}  // namespace

bool near_branch_cut(Scalar z, double margin) {
  const double r = std::abs(z);
  if (r == 0.0) return true;
  return z.real() < 0.0 && std::abs(z.imag()) <= margin * r;
}

Jet reciprocal(const Jet& a) {
  const Scalar a0 = a.value();
  if (a0 == Scalar{}) throw DomainError("division by a jet whose value is zero");
  std::vector<Scalar> series(a.order() + 1);
  Scalar term = 1.0 / a0;
  for (auto& s : series) {
    s = term;
    term *= -1.0 / a0;
  }
  return compose(a, series);
}

Jet log(const Jet& a, const JetOptions& opts) {
  const Scalar a0 = a.value();
  check_cut(a0, opts, "log");
  std::vector<Scalar> series(a.order() + 1);
  series[0] = std::log(a0);
  Scalar inv_pow = 1.0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    inv_pow /= a0;
    series[k] = ((k % 2) ? 1.0 : -1.0) * inv_pow / static_cast<double>(k);
  }
  return compose(a, series);
}

Jet exp(const Jet& a) {
  std::vector<Scalar> series(a.order() + 1);
  Scalar term = std::exp(a.value());
  for (std::size_t k = 0; k < series.size(); ++k) {
    series[k] = term;
    term /= static_cast<double>(k + 1);
  }
  return compose(a, series);
}

Jet pow(const Jet& a, double r, const JetOptions& opts) {
  if (is_integer(r)) {
    if (r < 0 && a.value() == Scalar{}) throw DomainError("negative integer power of a jet whose value is zero");
    return integer_power(a, static_cast<long long>(r));
  }
  const Scalar a0 = a.value();
  check_cut(a0, opts, "pow");
  std::vector<Scalar> series(a.order() + 1);
  // a0^r * binom(r, k) / a0^k
  Scalar term = std::exp(r * std::log(a0));
  for (std::size_t k = 0; k < series.size(); ++k) {
    series[k] = term;
    term *= (r - static_cast<double>(k)) / (static_cast<double>(k + 1) * a0);
  }
  return compose(a, series);
}

Jet sqrt(const Jet& a, const JetOptions& opts) { return pow(a, 0.5, opts); }

// ---------------------------------------------------------------------------
// Gradient reconstruction

Jet from_gradient(std::span<const Jet> gradient, Scalar value) {
  if (gradient.empty()) throw ShapeError("empty gradient");
  const std::size_t n = gradient.front().nvars();
  const std::size_t k_in = gradient.front().order();
  if (gradient.size() != n) throw ShapeError("gradient must have one jet per variable");
  for (const auto& g : gradient) {
    if (g.nvars() != n || g.order() != k_in) throw ShapeError("gradient jets must share one layout");
  }
  auto layout = JetLayout::get(n, k_in + 1);
  std::vector<Scalar> c(layout->size());
  c[0] = value;
  for (std::size_t k = 1; k < layout->size(); ++k) {
    const auto& m = layout->monomial(k);
    std::size_t v = 0;
    while (m[v] == 0) ++v;
    std::vector<unsigned> lowered = m.exponents();
    --lowered[v];
    c[k] = gradient[v].coeff(MultiIndex(std::move(lowered))) / static_cast<double>(m[v]);
  }
  return Jet(std::move(layout), std::move(c));
}

double gradient_curl(std::span<const Jet> gradient) {
  if (gradient.empty()) return 0.0;
  const std::size_t n = gradient.front().nvars();
  auto layout = JetLayout::get(n, gradient.front().order() + 1);
  double worst = 0.0;
  for (std::size_t k = 1; k < layout->size(); ++k) {
    const auto& m = layout->monomial(k);
    bool have = false;
    Scalar ref;
    for (std::size_t v = 0; v < n; ++v) {
      if (m[v] == 0) continue;
      std::vector<unsigned> lowered = m.exponents();
      --lowered[v];
      const Scalar c = gradient[v].coeff(MultiIndex(std::move(lowered))) / static_cast<double>(m[v]);
      if (!have) {
        ref = c;
        have = true;
      } else {
        worst = std::max(worst, std::abs(c - ref));
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Named operations

Jet jet_var(std::size_t index, Scalar value, std::size_t nvars, std::size_t order) {
  return Jet::variable(index, value, nvars, order);
}

Jet jet_arith(ArithOp op, const Jet& a, const Jet& b) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
  }
  throw ShapeError("unknown arithmetic op");
}

Jet jet_unary(UnaryOp op, const Jet& a, double exponent, const JetOptions& opts) {
  switch (op) {
    case UnaryOp::log: return log(a, opts);
    case UnaryOp::exp: return exp(a);
    case UnaryOp::pow: return pow(a, exponent, opts);
  }
  throw ShapeError("unknown unary op");
}

Scalar partial(const Jet& j, const MultiIndex& idx) { return j.partial(idx); }

}  // namespace wdvv
