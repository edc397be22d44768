#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "mconc/hermitian.hpp"

namespace mconc {

enum class InequalityId {
  exchangeable,         // Tr(C(e^A - e^B)) <= Tr((C^2 + (A-B)^2)/2 (e^A + e^B)/2)
  exchangeable_scaled,  // theta-scaled form, reversed for theta < 0
  mackey,               // Tr((X-X')(e^{tX} - e^{tX'})) <= t/2 Tr((X-X')^2 (e^{tX} + e^{tX'}))
  power,                // Tr(C(A^k - B^k)) <= k Tr((C^2 + (A-B)^2)/4 (A^{k-1} + B^{k-1}))
  symmetric_term,       // Re Tr(C(A^k D B^{n-k} + A^{n-k} D B^k)) <= Tr((C^2 + D^2)/2 (A^n + B^n))
  holder,               // Re Tr(C A^p D B^{1-p} + C A^{1-p} D B^p) <= Tr((C^2 + D^2)/2 (A + B))
  sqrm,                 // PQ + Q*P* <= PP* + Q*Q
  sqrm4,                // Re Tr(PQRS) <= Tr((P^2 + R^2)(Q^2 + S^2))/4
  expconj,              // conjectured positive/negative-part refinement with e^x
  fconj,                // same with a monotone convex f
};

inline constexpr std::array<InequalityId, 8> kProvenInequalities = {
    InequalityId::exchangeable, InequalityId::exchangeable_scaled, InequalityId::mackey,
    InequalityId::power,        InequalityId::symmetric_term,      InequalityId::holder,
    InequalityId::sqrm,         InequalityId::sqrm4};

std::string_view to_string(InequalityId id);
InequalityId parse_inequality_id(std::string_view name);
bool is_proven(InequalityId id);

// One evaluated inequality instance. gap >= 0 always means the inequality holds on
// this instance. `anchor` is the magnitude scale of the traced products
// (d * sum of products of factor norms); violations are judged as gap < -tol * anchor.
struct TraceGapReport {
  InequalityId id = InequalityId::exchangeable;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double anchor = 0.0;
  std::string inputs_digest;
  std::optional<std::uint64_t> seed;
  std::map<std::string, double> params;

  double relative_gap() const { return anchor > 0.0 ? gap / anchor : gap; }
  bool violates(double rel_tol) const { return gap < -rel_tol * anchor; }
};

TraceGapReport gap_exchangeable(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c);

// theta > 0: gap = theta*RHS - LHS; theta < 0: gap = LHS - theta*RHS. Reported rhs is theta*RHS.
TraceGapReport gap_exchangeable_scaled(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                                       double theta);

TraceGapReport gap_mackey(const HermitianMatrix& x, const HermitianMatrix& xp, double theta);

// A, B PSD (tolerance 1e-10 relative), k >= 1.
TraceGapReport gap_power(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c, int k);

// A, B positive definite (lambda_min > 0), 0 <= k <= n.
TraceGapReport gap_symmetric_term(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c, int k,
                                  int n);

// A, B PSD, p in [0, 1]; fractional powers through the spectral calculus.
TraceGapReport gap_holder(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                          const HermitianMatrix& d, double p);

struct SqrmCheck {
  double min_eigenvalue;  // lambda_min(PP* + Q*Q - PQ - Q*P*)
  bool holds;
};

SqrmCheck check_sqrm(const CMatrix& p, const CMatrix& q, double tol);

// As a gap report: lhs = 0, rhs = gap = lambda_min; anchor = (||P|| + ||Q||)^2.
TraceGapReport gap_sqrm(const CMatrix& p, const CMatrix& q);

TraceGapReport gap_sqrm4(const HermitianMatrix& p, const HermitianMatrix& q, const HermitianMatrix& r,
                         const HermitianMatrix& s);

// Shared PSD/PD precondition checks; throw DomainError naming the offending eigenvalue.
void require_psd(const HermitianMatrix& a, const char* name, double rel_tol = 1e-10);
void require_positive_definite(const HermitianMatrix& a, const char* name);

}  // namespace mconc
