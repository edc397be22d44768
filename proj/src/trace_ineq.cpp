#include "mconc/trace_ineq.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "mconc/matrix_io.hpp"

namespace mconc {

namespace {

struct Names {
  InequalityId id;
  std::string_view name;
};

constexpr std::array<Names, 10> kNames = {{
    {InequalityId::exchangeable, "exchangeable"},
    {InequalityId::exchangeable_scaled, "exchangeable-scaled"},
    {InequalityId::mackey, "mackey"},
    {InequalityId::power, "power"},
    {InequalityId::symmetric_term, "symmetric-term"},
    {InequalityId::holder, "holder"},
    {InequalityId::sqrm, "sqrm"},
    {InequalityId::sqrm4, "sqrm4"},
    {InequalityId::expconj, "expconj"},
    {InequalityId::fconj, "fconj"},
}};

double d_of(const HermitianMatrix& a) { return static_cast<double>(a.dim()); }

std::string digest_of(std::initializer_list<const HermitianMatrix*> ms, std::initializer_list<double> params) {
  Digest d;
  for (const auto* m : ms) d.add(*m);
  for (double p : params) d.add(p);
  return d.hex();
}

// Spectral powers of a PSD matrix from one decomposition; tiny negative eigenvalues
// (within the PSD tolerance) are clamped to zero.
class PsdPowers {
 public:
  explicit PsdPowers(const HermitianMatrix& a) : eig_(spectral_decompose(a)) {
    for (Eigen::Index i = 0; i < eig_.eigenvalues.size(); ++i) eig_.eigenvalues(i) = std::max(eig_.eigenvalues(i), 0.0);
  }
  HermitianMatrix power(double p) const {
    return matrix_function(eig_, [p](double x) { return std::pow(x, p); });
  }
  double norm() const { return eig_.eigenvalues.maxCoeff(); }

 private:
  SpectralDecomposition eig_;
};

}  // namespace

std::string_view to_string(InequalityId id) {
  for (const auto& n : kNames) {
    if (n.id == id) return n.name;
  }
  return "unknown";
}

InequalityId parse_inequality_id(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.id;
  }
  throw ConfigError("unknown inequality id '" + std::string(name) + "'");
}

bool is_proven(InequalityId id) { return id != InequalityId::expconj && id != InequalityId::fconj; }

void require_psd(const HermitianMatrix& a, const char* name, double rel_tol) {
  const RVector ev = eigenvalues(a);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -rel_tol * scale) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << " must be positive semidefinite; eigenvalue " << ev.minCoeff();
    throw DomainError(msg.str());
  }
}

void require_positive_definite(const HermitianMatrix& a, const char* name) {
  const double m = lambda_min(a);
  if (!(m > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << " must be positive definite; eigenvalue " << m;
    throw DomainError(msg.str());
  }
}

TraceGapReport gap_exchangeable(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c) {
  require_same_dim(a, b, "gap_exchangeable");
  require_same_dim(a, c, "gap_exchangeable");
  const HermitianMatrix ea = matrix_exp(a);
  const HermitianMatrix eb = matrix_exp(b);
  const HermitianMatrix diff = a - b;
  TraceGapReport r;
  r.id = InequalityId::exchangeable;
  r.lhs = trace_product(c, ea - eb);
  r.rhs = trace_product((c.squared() + diff.squared()) * 0.5, (ea + eb) * 0.5);
  r.gap = r.rhs - r.lhs;
  const double nc = spectral_norm(c), nd = spectral_norm(diff), ne = spectral_norm(ea) + spectral_norm(eb);
  r.anchor = d_of(a) * (nc * ne + 0.25 * (nc * nc + nd * nd) * ne);
  r.inputs_digest = digest_of({&a, &b, &c}, {});
  return r;
}

TraceGapReport gap_exchangeable_scaled(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                                       double theta) {
  if (theta == 0.0 || !std::isfinite(theta)) throw DomainError("gap_exchangeable_scaled: theta must be nonzero");
  require_same_dim(a, b, "gap_exchangeable_scaled");
  require_same_dim(a, c, "gap_exchangeable_scaled");
  const HermitianMatrix ea = matrix_exp(a * theta);
  const HermitianMatrix eb = matrix_exp(b * theta);
  const HermitianMatrix diff = a - b;
  TraceGapReport r;
  r.id = InequalityId::exchangeable_scaled;
  r.lhs = trace_product(c, ea - eb);
  r.rhs = theta * trace_product((c.squared() + diff.squared()) * 0.5, (ea + eb) * 0.5);
  r.gap = theta > 0.0 ? r.rhs - r.lhs : r.lhs - r.rhs;
  const double nc = spectral_norm(c), nd = spectral_norm(diff), ne = spectral_norm(ea) + spectral_norm(eb);
  r.anchor = d_of(a) * (nc * ne + 0.25 * std::abs(theta) * (nc * nc + nd * nd) * ne);
  r.inputs_digest = digest_of({&a, &b, &c}, {theta});
  r.params["theta"] = theta;
  return r;
}

TraceGapReport gap_mackey(const HermitianMatrix& x, const HermitianMatrix& xp, double theta) {
  if (!(theta > 0.0)) throw DomainError("gap_mackey: theta must be positive");
  require_same_dim(x, xp, "gap_mackey");
  const HermitianMatrix e1 = matrix_exp(x * theta);
  const HermitianMatrix e2 = matrix_exp(xp * theta);
  const HermitianMatrix diff = x - xp;
  TraceGapReport r;
  r.id = InequalityId::mackey;
  r.lhs = trace_product(diff, e1 - e2);
  r.rhs = 0.5 * theta * trace_product(diff.squared(), e1 + e2);
  r.gap = r.rhs - r.lhs;
  const double nd = spectral_norm(diff), ne = spectral_norm(e1) + spectral_norm(e2);
  r.anchor = d_of(x) * (nd * ne + 0.5 * theta * nd * nd * ne);
  r.inputs_digest = digest_of({&x, &xp}, {theta});
  r.params["theta"] = theta;
  return r;
}

TraceGapReport gap_power(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c, int k) {
  if (k < 1) throw DomainError("gap_power: k must be >= 1");
  require_same_dim(a, b, "gap_power");
  require_same_dim(a, c, "gap_power");
  require_psd(a, "A");
  require_psd(b, "B");
  const PsdPowers pa(a), pb(b);
  const HermitianMatrix diff = a - b;
  TraceGapReport r;
  r.id = InequalityId::power;
  r.lhs = trace_product(c, pa.power(k) - pb.power(k));
  r.rhs = k * trace_product((c.squared() + diff.squared()) * 0.25, pa.power(k - 1) + pb.power(k - 1));
  r.gap = r.rhs - r.lhs;
  const double nc = spectral_norm(c), nd = spectral_norm(diff), na = pa.norm(), nb = pb.norm();
  r.anchor = d_of(a) * (nc * (std::pow(na, k) + std::pow(nb, k)) +
                        0.25 * k * (nc * nc + nd * nd) * (std::pow(na, k - 1) + std::pow(nb, k - 1)));
  r.inputs_digest = digest_of({&a, &b, &c}, {static_cast<double>(k)});
  r.params["k"] = k;
  return r;
}

TraceGapReport gap_symmetric_term(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c, int k,
                                  int n) {
  if (k < 0 || n < k) throw DomainError("gap_symmetric_term: need 0 <= k <= n");
  require_same_dim(a, b, "gap_symmetric_term");
  require_same_dim(a, c, "gap_symmetric_term");
  require_positive_definite(a, "A");
  require_positive_definite(b, "B");
  const PsdPowers pa(a), pb(b);
  const HermitianMatrix diff = a - b;
  const CMatrix& cm = c.matrix();
  const CMatrix& dm = diff.matrix();
  const CMatrix t1 = pa.power(k).matrix() * dm * pb.power(n - k).matrix();
  const CMatrix t2 = pa.power(n - k).matrix() * dm * pb.power(k).matrix();
  TraceGapReport r;
  r.id = InequalityId::symmetric_term;
  r.lhs = (cm * (t1 + t2)).trace().real();
  r.rhs = trace_product((c.squared() + diff.squared()) * 0.5, pa.power(n) + pb.power(n));
  r.gap = r.rhs - r.lhs;
  const double nc = spectral_norm(c), nd = spectral_norm(diff), na = pa.norm(), nb = pb.norm();
  r.anchor = d_of(a) * (nc * nd * (std::pow(na, k) * std::pow(nb, n - k) + std::pow(na, n - k) * std::pow(nb, k)) +
                        0.5 * (nc * nc + nd * nd) * (std::pow(na, n) + std::pow(nb, n)));
  r.inputs_digest = digest_of({&a, &b, &c}, {static_cast<double>(k), static_cast<double>(n)});
  r.params["k"] = k;
  r.params["n"] = n;
  return r;
}

TraceGapReport gap_holder(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                          const HermitianMatrix& d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("gap_holder: p must lie in [0, 1]");
  require_same_dim(a, b, "gap_holder");
  require_same_dim(a, c, "gap_holder");
  require_same_dim(a, d, "gap_holder");
  require_psd(a, "A");
  require_psd(b, "B");
  const PsdPowers pa(a), pb(b);
  const CMatrix& cm = c.matrix();
  const CMatrix& dm = d.matrix();
  const double q = 1.0 - p;
  const CMatrix t1 = cm * pa.power(p).matrix() * dm * pb.power(q).matrix();
  const CMatrix t2 = cm * pa.power(q).matrix() * dm * pb.power(p).matrix();
  TraceGapReport r;
  r.id = InequalityId::holder;
  r.lhs = t1.trace().real() + t2.trace().real();
  r.rhs = trace_product((c.squared() + d.squared()) * 0.5, a + b);
  r.gap = r.rhs - r.lhs;
  const double nc = spectral_norm(c), nd = spectral_norm(d), na = pa.norm(), nb = pb.norm();
  r.anchor = d_of(a) * (nc * nd * (std::pow(na, p) * std::pow(nb, q) + std::pow(na, q) * std::pow(nb, p)) +
                        0.5 * (nc * nc + nd * nd) * (na + nb));
  r.inputs_digest = digest_of({&a, &b, &c, &d}, {p});
  r.params["p"] = p;
  return r;
}

SqrmCheck check_sqrm(const CMatrix& p, const CMatrix& q, double tol) {
  if (p.rows() != p.cols() || q.rows() != q.cols() || p.rows() != q.rows()) {
    throw DimensionMismatch("check_sqrm: P and Q must be square of equal size");
  }
  const CMatrix pq = p * q;
  const CMatrix diff = p * p.adjoint() + q.adjoint() * q - pq - pq.adjoint();
  const double m = lambda_min(HermitianMatrix::symmetrized(diff));
  return {m, m >= -tol};
}

TraceGapReport gap_sqrm(const CMatrix& p, const CMatrix& q) {
  const SqrmCheck chk = check_sqrm(p, q, 0.0);
  TraceGapReport r;
  r.id = InequalityId::sqrm;
  r.lhs = 0.0;
  r.rhs = chk.min_eigenvalue;
  r.gap = chk.min_eigenvalue;
  const double s = operator_norm(p) + operator_norm(q);
  r.anchor = s * s;
  r.inputs_digest = Digest().add(p).add(q).hex();
  return r;
}

TraceGapReport gap_sqrm4(const HermitianMatrix& p, const HermitianMatrix& q, const HermitianMatrix& r_,
                         const HermitianMatrix& s) {
  require_same_dim(p, q, "gap_sqrm4");
  require_same_dim(p, r_, "gap_sqrm4");
  require_same_dim(p, s, "gap_sqrm4");
  TraceGapReport r;
  r.id = InequalityId::sqrm4;
  r.lhs = (p.matrix() * q.matrix() * r_.matrix() * s.matrix()).trace().real();
  r.rhs = 0.25 * trace_product(p.squared() + r_.squared(), q.squared() + s.squared());
  r.gap = r.rhs - r.lhs;
  const double np = spectral_norm(p), nq = spectral_norm(q), nr = spectral_norm(r_), ns = spectral_norm(s);
  r.anchor = d_of(p) * (np * nq * nr * ns + 0.25 * (np * np + nr * nr) * (nq * nq + ns * ns));
  r.inputs_digest = digest_of({&p, &q, &r_, &s}, {});
  return r;
}

}  // namespace mconc
