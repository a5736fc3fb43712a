#include "golden.h"

namespace golden {

using namespace ddc;

namespace {

const Site A = Site::A, B = Site::B, X = Site::X;

CRational i_pow(int n) {
  CRational c(1);
  for (int k = 0; k < n; ++k) c *= CRational::i();
  return c;
}

CRational half() { return CRational(Rational(1, 2)); }

// [phi(a@ta), phi(b@tb)] = 2 chi^F(a@ta, b@tb)
OperatorExpr fcomm(Site a, int ta, Site b, int tb) {
  return kernel(KernelKind::FieldChi, a, ta, b, tb) * CRational(2);
}

OperatorExpr facomm(Site a, int ta, Site b, int tb) { return anticommutator(phi(a, ta), phi(b, tb)); }

OperatorExpr C(Site a, int ta, Site b, int tb) { return kernel(KernelKind::FieldC, a, ta, b, tb); }
OperatorExpr Chi(Site a, int ta, Site b, int tb) { return kernel(KernelKind::FieldChi, a, ta, b, tb); }
OperatorExpr CAt(Site s, int t1, int t2) { return kernel(KernelKind::AtomC, s, t1, s, t2); }
OperatorExpr ChiAt(Site s, int t1, int t2) { return kernel(KernelKind::AtomChi, s, t1, s, t2); }

OperatorExpr R(Site s, int t) { return ddc::r2(s, t); }
OperatorExpr comm(const OperatorExpr& a, const OperatorExpr& b) { return commutator(a, b); }
OperatorExpr acomm(const OperatorExpr& a, const OperatorExpr& b) { return anticommutator(a, b); }

const std::vector<int> chain1{0};
const std::vector<int> chain2{0, 1};
const std::vector<int> chain3{0, 1, 2};

// Expansion of an A operator O(tau) whose free part is `o`.
OperatorExpr atom_expansion(const OperatorExpr& o, int order) {
  switch (order) {
    case 0: return o;
    case 1: return integrate(phi(A, 1) * comm(R(A, 1), o), chain1, 1) * i_pow(1);
    case 2: {
      OperatorExpr e = fcomm(A, 2, A, 1) * acomm(R(A, 2), comm(R(A, 1), o)) * half() +
                       fcomm(B, 2, A, 1) * R(B, 2) * comm(R(A, 1), o) +
                       facomm(A, 2, A, 1) * comm(R(A, 2), comm(R(A, 1), o)) * half();
      return integrate(e, chain2, 2) * i_pow(2);
    }
    case 3: {
      OperatorExpr e = phi(B, 3) * fcomm(B, 2, A, 1) * comm(R(B, 3), R(B, 2)) * comm(R(A, 1), o);
      return integrate(e, chain3, 3) * i_pow(3);
    }
  }
  return {};
}

}  // namespace

OperatorExpr r2(int order) { return atom_expansion(R(A, 0), order); }
OperatorExpr r3(int order) { return atom_expansion(ddc::r3(A), order); }

OperatorExpr field(int order) {
  switch (order) {
    case 0: return phi(X, 0);
    case 1: {
      OperatorExpr e;
      for (Site s : {A, B}) e += R(s, 1) * fcomm(s, 1, X, 0);
      return integrate(e, chain1, 1) * i_pow(1);
    }
    case 2: {
      OperatorExpr e;
      for (Site s : {A, B}) e += phi(s, 2) * fcomm(s, 1, X, 0) * comm(R(s, 2), R(s, 1));
      return integrate(e, chain2, 2) * i_pow(2);
    }
    case 3: {
      OperatorExpr e = fcomm(A, 3, B, 2) * fcomm(B, 1, X, 0) * R(A, 3) * comm(R(B, 2), R(B, 1));
      return integrate(e, chain3, 3) * i_pow(3);
    }
  }
  return {};
}

OperatorExpr field3_four_terms() {
  OperatorExpr t1 = integrate(fcomm(B, 2, A, 1) * fcomm(B, 3, X, 0) * R(A, 1) * comm(R(B, 2), R(B, 3)),
                              {0, 1, 1}, 3);
  OperatorExpr t2 = integrate(fcomm(B, 2, A, 1) * fcomm(B, 3, X, 0) * R(A, 1) * comm(R(B, 3), R(B, 2)),
                              chain3, 3);
  OperatorExpr t3 = integrate(fcomm(A, 1, B, 3) * fcomm(B, 2, X, 0) * R(A, 1) * comm(R(B, 3), R(B, 2)),
                              chain3, 3);
  return (t1 + t2 + t3) * i_pow(3) + field(3);
}

OperatorExpr effective_rr2() {
  CRational c = CRational::i() * half();
  return integrate(Chi(B, 1, A, 0) * acomm(R(B, 1), R(A, 0)), chain1, 2) * c;
}

OperatorExpr effective_vf4() {
  CRational c = CRational::i() * half();
  return integrate(C(A, 0, B, 3) * Chi(B, 2, A, 1) * comm(R(B, 3), R(B, 2)) * comm(R(A, 0), R(A, 1)),
                   chain3, 4) *
         c;
}

OperatorExpr effective_rr4_term(int k) {
  CRational c = CRational::i() * half();
  switch (k) {
    case 1:
      return integrate(Chi(B, 1, A, 0) * Chi(B, 3, A, 2) * acomm(R(B, 1), R(B, 3)) * comm(R(A, 0), R(A, 2)),
                       {0, 0, 2}, 4) *
             c;
    case 2:
      return integrate(C(B, 2, A, 3) * Chi(B, 1, A, 0) * comm(R(B, 2), R(B, 1)) * comm(R(A, 0), R(A, 3)),
                       {0, 1, 0}, 4) *
             c;
    case 3:
      return integrate(Chi(B, 2, A, 1) * Chi(B, 3, A, 0) * comm(R(B, 3), R(B, 2)) * acomm(R(A, 1), R(A, 0)),
                       {0, 1, 1}, 4) *
             c;
    case 4:
      return integrate(Chi(B, 2, A, 1) * Chi(B, 3, A, 0) * comm(R(B, 2), R(B, 3)) * acomm(R(A, 1), R(A, 0)),
                       chain3, 4) *
             c;
    case 5:
      return integrate(Chi(A, 1, B, 3) * Chi(B, 2, A, 0) * comm(R(B, 2), R(B, 3)) * acomm(R(A, 1), R(A, 0)),
                       chain3, 4) *
             c;
    case 6:
      return integrate(Chi(A, 3, B, 2) * Chi(B, 1, A, 0) * comm(R(B, 1), R(B, 2)) * acomm(R(A, 3), R(A, 0)),
                       chain3, 4) *
             c;
  }
  return {};
}

OperatorExpr effective_rr4() {
  OperatorExpr e;
  for (int k = 1; k <= 6; ++k) e += effective_rr4_term(k);
  return e;
}

OperatorExpr potential_vf4() {
  CRational c = CRational::i() * CRational(2);
  return integrate(C(A, 0, B, 3) * Chi(B, 2, A, 1) * ChiAt(B, 3, 2) * ChiAt(A, 0, 1), chain3, 4) * c;
}

OperatorExpr potential_rr4_term(int k) {
  CRational c = CRational::i() * CRational(2);
  switch (k) {
    case 1: return integrate(Chi(B, 1, A, 0) * Chi(B, 3, A, 2) * CAt(B, 1, 3) * ChiAt(A, 0, 2), {0, 0, 2}, 4) * c;
    case 2: return integrate(C(B, 2, A, 3) * Chi(B, 1, A, 0) * ChiAt(B, 1, 2) * ChiAt(A, 3, 0), {0, 1, 0}, 4) * c;
    case 3: return integrate(Chi(B, 2, A, 1) * Chi(B, 3, A, 0) * ChiAt(B, 3, 2) * CAt(A, 1, 0), {0, 1, 1}, 4) * c;
    case 4: return integrate(Chi(B, 2, A, 1) * Chi(B, 3, A, 0) * ChiAt(B, 2, 3) * CAt(A, 1, 0), chain3, 4) * c;
    case 5: return integrate(Chi(A, 1, B, 3) * Chi(B, 2, A, 0) * ChiAt(B, 2, 3) * CAt(A, 1, 0), chain3, 4) * c;
    case 6: return integrate(Chi(A, 3, B, 2) * Chi(B, 1, A, 0) * ChiAt(B, 1, 2) * CAt(A, 3, 0), chain3, 4) * c;
  }
  return {};
}

OperatorExpr potential_rr4() {
  OperatorExpr e;
  for (int k = 1; k <= 6; ++k) e += potential_rr4_term(k);
  return e;
}

OperatorExpr with_mirror(const OperatorExpr& e) { return e + swap_atoms(e); }

}  // namespace golden

namespace golden {
using namespace ddc;
namespace {
OperatorExpr omega_a() {
  Monomial m;
  m.omega[0] = 1;
  OperatorExpr e;
  e.add(std::move(m), CRational(1));
  return e;
}
}  // namespace

OperatorExpr rate_rr4_term(int k) {
  using ddc::r2;
  const Site A = Site::A, B = Site::B;
  auto R = [](Site s, int t) { return r2(s, t); };
  auto Chi = [](Site a, int ta, Site b, int tb) { return kernel(KernelKind::FieldChi, a, ta, b, tb); };
  auto Cf = [](Site a, int ta, Site b, int tb) { return kernel(KernelKind::FieldC, a, ta, b, tb); };
  OperatorExpr H = omega_a() * r3(A);
  auto nest = [&](int s) { return commutator(R(A, s), commutator(R(A, 0), H)); };
  auto anest = [&](int s) { return anticommutator(R(A, s), commutator(R(A, 0), H)); };
  OperatorExpr e;
  switch (k) {
    case 1: e = integrate(Chi(B, 1, A, 0) * Chi(B, 3, A, 2) * anticommutator(R(B, 1), R(B, 3)) * nest(2), {0, 0, 2}, 4); break;
    case 2: e = integrate(Cf(B, 2, A, 3) * Chi(B, 1, A, 0) * commutator(R(B, 2), R(B, 1)) * nest(3), {0, 1, 0}, 4); break;
    case 3: e = integrate(Chi(B, 2, A, 1) * Chi(B, 3, A, 0) * commutator(R(B, 2), R(B, 3)) * anest(1), {0, 1, 1}, 4); break;
    case 4: e = integrate(Chi(B, 2, A, 1) * Chi(B, 3, A, 0) * commutator(R(B, 3), R(B, 2)) * anest(1), {0, 1, 2}, 4); break;
    case 5: e = integrate(Chi(A, 1, B, 3) * Chi(B, 2, A, 0) * commutator(R(B, 3), R(B, 2)) * anest(1), {0, 1, 2}, 4); break;
    case 6: e = integrate(Chi(A, 3, B, 2) * Chi(B, 1, A, 0) * commutator(R(B, 2), R(B, 1)) * anest(3), {0, 1, 2}, 4); break;
  }
  return e * CRational(2);
}

}  // namespace golden
