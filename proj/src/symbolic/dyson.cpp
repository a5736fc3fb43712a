#include "ddc/dyson.h"

#include <map>
#include <tuple>

namespace ddc {

namespace {

// i mu [R2^xi(t) phi_xi(t), M] for the new variable t, summed over xi.
// [R2 phi, a F] = [R2, a] F phi + R2 a [phi, F] since fields and atoms commute.
OperatorExpr dyson_step(const OperatorExpr& e) {
  OperatorExpr out;
  for (const auto& [m, c] : e.terms()) {
    int t = m.num_vars() + 1;
    Monomial base = m;
    base.domain.push_back(t - 1);
    base.mu += 1;
    CRational ic = c * CRational::i();
    for (Site xi : {Site::A, Site::B}) {
      AtomSymbol letter{Op::R2, xi, t};
      // [R2, a] by the Leibniz rule; letters of the other atom commute.
      for (std::size_t j = 0; j < m.atoms.size(); ++j) {
        if (m.atoms[j].atom != xi || m.atoms[j].op == Op::System) continue;
        for (int side = 0; side < 2; ++side) {
          Monomial n = base;
          n.atoms.insert(n.atoms.begin() + static_cast<long>(j + side), letter);
          n.fields.push_back({xi, t});
          out.add(std::move(n), side == 0 ? ic : -ic);
        }
      }
      for (std::size_t k = 0; k < m.fields.size(); ++k) {
        auto [ker, s] = make_kernel(KernelKind::FieldChi, xi, t, m.fields[k].site, m.fields[k].time);
        if (s == 0) continue;
        Monomial n = base;
        n.atoms.insert(n.atoms.begin(), letter);
        n.fields.erase(n.fields.begin() + static_cast<long>(k));
        n.kernels.push_back(ker);
        tidy(n);
        out.add(std::move(n), ic * CRational(2 * s));
      }
    }
  }
  return out;
}

OperatorExpr seed(SourceSymbol sym, Site site) {
  switch (sym) {
    case SourceSymbol::R2: return r2(site, kTau);
    case SourceSymbol::R3: return r3(site);
    case SourceSymbol::Field: return phi(site, kTau);
  }
  return {};
}

}  // namespace

OperatorExpr dyson_expansion(SourceSymbol sym, Site site, int order) {
  if (order < 0) throw UnsupportedOrder("negative order");
  if ((sym != SourceSymbol::Field) && site == Site::X)
    throw std::invalid_argument("atom operators live on A or B");
  static std::map<std::tuple<SourceSymbol, Site, int>, OperatorExpr> cache;
  auto key = std::make_tuple(sym, site, order);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  OperatorExpr e = order == 0 ? seed(sym, site) : dyson_step(dyson_expansion(sym, site, order - 1));
  cache.emplace(key, e);
  return e;
}

OperatorExpr source_expansion(SourceSymbol sym, Site site, int order) {
  if (order > 3) throw UnsupportedOrder("source expansion supports orders up to 3");
  OperatorExpr full = dyson_expansion(sym, site, order);
  if (order < 3) return full;
  Site other = site == Site::B ? Site::A : Site::B;
  OperatorExpr kept;
  for (const auto& [m, c] : full.terms()) {
    int p = monopole_power(m, other);
    if (p == 2)
      kept.add(m, c);
    else
      kept.remainder[p] += 1;
  }
  return kept;
}

OperatorExpr variation_rate(Site atom, Part part, int order, Rational lambda) {
  if (order < 1 || order > 4) throw UnsupportedOrder("variation rates are available for orders 1..4");
  if (atom == Site::X) throw std::invalid_argument("variation rate needs an atom");
  Monomial pre;
  pre.mu = 1;
  pre.omega[atom_index(atom)] = 1;
  OperatorExpr prefactor;
  prefactor.add(pre, CRational::i());
  OperatorExpr out;
  for (int m = 0; m <= order - 1; ++m) {
    if ((part == Part::vf) != (m == 0)) continue;
    OperatorExpr field = dyson_expansion(SourceSymbol::Field, atom, m);
    for (int i = 0; i + m <= order - 1; ++i) {
      int j = order - 1 - m - i;
      OperatorExpr c = commutator(dyson_expansion(SourceSymbol::R2, atom, i),
                                  dyson_expansion(SourceSymbol::R3, atom, j));
      if (c.empty()) continue;
      out += field * c * CRational(lambda) + c * field * CRational(1 - lambda);
    }
  }
  return prefactor * out;
}

namespace {

void pair_fields(const Monomial& m, CRational c, OperatorExpr& out) {
  if (m.fields.empty()) {
    out.add(m, c);
    return;
  }
  if (m.fields.size() % 2 == 1) return;
  const FieldSymbol f = m.fields.front();
  for (std::size_t j = 1; j < m.fields.size(); ++j) {
    // <phi_i phi_j> = C^F(i, j) + chi^F(i, j) for phi_i left of phi_j.
    for (KernelKind kind : {KernelKind::FieldC, KernelKind::FieldChi}) {
      auto [k, s] = make_kernel(kind, f.site, f.time, m.fields[j].site, m.fields[j].time);
      if (s == 0) continue;
      Monomial n = m;
      n.fields.erase(n.fields.begin() + static_cast<long>(j));
      n.fields.erase(n.fields.begin());
      n.kernels.push_back(k);
      tidy(n);
      pair_fields(n, c * CRational(s), out);
    }
  }
}

}  // namespace

OperatorExpr vacuum_reduce(const OperatorExpr& e) {
  OperatorExpr out;
  for (const auto& [m, c] : e.terms()) pair_fields(m, c, out);
  out.remainder = e.remainder;
  return out;
}

}  // namespace ddc
