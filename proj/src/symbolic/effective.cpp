#include "ddc/effective.h"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace ddc {

namespace {

struct GroupKey {
  int mu = 0;
  std::array<int, 2> omega{};
  std::vector<int> domain;
  std::vector<Kernel> kernels;
  std::vector<PhaseFactor> phase;
  auto operator<=>(const GroupKey&) const = default;
};

GroupKey key_of(const Monomial& m) { return {m.mu, m.omega, m.domain, m.kernels, m.phase}; }

Monomial letters_only(const Monomial& m) {
  Monomial a;
  a.atoms = m.atoms;
  return a;
}

Monomial with_letters(const GroupKey& k, const Monomial& letters) {
  Monomial m;
  m.mu = k.mu;
  m.omega = k.omega;
  m.domain = k.domain;
  m.kernels = k.kernels;
  m.phase = k.phase;
  m.atoms = letters.atoms;
  if (!letters.fields.empty()) throw AlgebraError("integral terms carry no field operators");
  return m;
}

}  // namespace

std::vector<IntegralTerm> group_terms(const OperatorExpr& e, Site origin) {
  std::map<GroupKey, OperatorExpr> groups;
  for (const auto& [m, c] : e.terms()) {
    int n = m.num_vars();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    std::optional<GroupKey> best;
    std::vector<std::pair<Monomial, int>> images;
    do {
      std::vector<int> map(n + 1, 0);
      for (int v = 1; v <= n; ++v) map[v] = perm[v - 1];
      Monomial r = m;
      int s = relabel(r, map);
      if (s == 0) continue;
      GroupKey k = key_of(r);
      if (!best || k < *best) {
        best = k;
        images.clear();
      }
      if (k == *best) images.emplace_back(std::move(r), s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!best) continue;
    OperatorExpr& poly = groups[*best];
    CRational share = c / CRational(static_cast<long long>(images.size()));
    for (const auto& [r, s] : images) poly.add(letters_only(r), share * CRational(s));
  }
  std::vector<IntegralTerm> out;
  for (auto& [k, poly] : groups) {
    if (poly.empty()) continue;
    IntegralTerm t;
    t.mu = k.mu;
    t.domain = k.domain;
    t.kernels = k.kernels;
    t.origin = origin;
    t.prefactor = poly.terms().begin()->second;
    CRational inv = CRational(1) / t.prefactor;
    t.atoms = poly * inv;
    // omega powers and phases ride on the letters monomial
    OperatorExpr rebased;
    for (const auto& [m, c] : t.atoms.terms()) {
      Monomial mm = m;
      mm.omega = k.omega;
      mm.phase = k.phase;
      rebased.add(std::move(mm), c);
    }
    t.atoms = std::move(rebased);
    out.push_back(std::move(t));
  }
  return out;
}

OperatorExpr flatten(const std::vector<IntegralTerm>& terms) {
  OperatorExpr out;
  for (const auto& t : terms) {
    for (const auto& [m, c] : t.atoms.terms()) {
      GroupKey k{t.mu, m.omega, t.domain, t.kernels, m.phase};
      Monomial letters;
      letters.atoms = m.atoms;
      out.add(with_letters(k, letters), c * t.prefactor);
    }
  }
  return out;
}

std::size_t EffectiveHamiltonian::count(Site origin) const {
  return static_cast<std::size_t>(
      std::count_if(terms.begin(), terms.end(), [&](const IntegralTerm& t) { return t.origin == origin; }));
}

namespace {

struct ReadOff {
  OperatorExpr generator;
  std::size_t interior = 0;
};

bool is_energy(const AtomSymbol& s, Site atom) {
  return (s.op == Op::R3 && s.atom == atom) || (s.op == Op::System && atom == Site::X);
}

// Edge-word rule. With the rate linear in H, words u H and H v split as
//   sum a_u u H + sum b_v H v = [Z, H] + {W, H},  Z = (sum a_u u - sum b_v v) / 2,
// and i[G, H] = [Z, H] gives G = -i Z. Words with H inside stay behind.
// atom = X means H_S; otherwise H = omega_atom R3^atom and only that atom's
// letters are looked at (the other atom commutes with it).
ReadOff edge_read_off(const OperatorExpr& rate, Site atom) {
  ReadOff r;
  const CRational half_minus_i(Rational(0), Rational(-1, 2));
  for (const auto& [m, c] : rate.terms()) {
    Monomial w = m;
    if (atom != Site::X) sort_atom_letters(w.atoms);
    std::vector<std::size_t> own;
    for (std::size_t j = 0; j < w.atoms.size(); ++j) {
      if (atom == Site::X || w.atoms[j].atom == atom) own.push_back(j);
    }
    std::vector<std::size_t> hs;
    for (std::size_t j : own)
      if (is_energy(w.atoms[j], atom)) hs.push_back(j);
    if (hs.size() != 1) throw AlgebraError("read-off: rate term is not linear in H");
    if (own.size() == 1) continue;  // H alone: pure {1, H}/2
    int sign = 0;
    if (hs[0] == own.back())
      sign = 1;
    else if (hs[0] == own.front())
      sign = -1;
    if (sign == 0) {
      ++r.interior;
      continue;
    }
    w.atoms.erase(w.atoms.begin() + static_cast<long>(hs[0]));
    if (atom != Site::X) w.omega[atom_index(atom)] -= 1;
    r.generator.add(std::move(w), c * half_minus_i * CRational(sign));
  }
  return r;
}

int target_power(int order) {
  if (order != 2 && order != 4) throw UnsupportedOrder("effective Hamiltonians exist at orders 2 and 4");
  return order / 2;
}

// Vacuum-reduced rate of one atom restricted to the interatomic power.
OperatorExpr interatomic_rate(Site atom, Part part, int order, std::map<int, std::size_t>& rem) {
  int p = target_power(order);
  OperatorExpr reduced = vacuum_reduce(variation_rate(atom, part, order));
  OperatorExpr kept;
  for (const auto& [m, c] : reduced.terms()) {
    int q = monopole_power(m, partner(atom));
    if (q == p)
      kept.add(m, c);
    else
      rem[q] += 1;
  }
  return kept;
}

}  // namespace

EffectiveHamiltonian effective_hamiltonian(Part part, int order) {
  EffectiveHamiltonian h;
  const CRational half(Rational(1, 2));
  for (Site xi : {Site::A, Site::B}) {
    OperatorExpr rate = interatomic_rate(xi, part, order, h.remainder);
    ReadOff r = edge_read_off(rate, xi);
    h.non_generator += r.interior;
    auto terms = group_terms(r.generator * half, xi);
    h.terms.insert(h.terms.end(), terms.begin(), terms.end());
  }
  h.atom_independent = h.terms.empty();
  return h;
}

namespace {

// Replaces the R3 of `atom` (with its omega) by `by` at the same position.
OperatorExpr substitute_energy(const OperatorExpr& e, Site atom, AtomSymbol by) {
  OperatorExpr out;
  for (const auto& [m, c] : e.terms()) {
    Monomial w = m;
    for (auto& s : w.atoms) {
      if (s.op == Op::R3 && s.atom == atom) s = by;
    }
    w.omega[atom_index(atom)] -= 1;
    if (by.op == Op::R3) w.omega[atom_index(by.atom)] += 1;
    out.add(std::move(w), c);
  }
  return out;
}

struct Factored {
  OperatorExpr a;  // letters of atom A
  OperatorExpr b;  // letters of atom B
};

// Rank-one split of a letters polynomial into (A part) * (B part).
std::optional<Factored> factor(const OperatorExpr& poly) {
  std::map<std::vector<AtomSymbol>, std::map<std::vector<AtomSymbol>, CRational>> mat;
  for (const auto& [m, c] : poly.terms()) {
    std::vector<AtomSymbol> w = m.atoms;
    sort_atom_letters(w);
    auto split = std::find_if(w.begin(), w.end(), [](const AtomSymbol& s) { return s.atom == Site::B; });
    mat[{w.begin(), split}][{split, w.end()}] += c;
  }
  for (auto& [a, row] : mat) std::erase_if(row, [](const auto& kv) { return kv.second.is_zero(); });
  std::erase_if(mat, [](const auto& kv) { return kv.second.empty(); });
  if (mat.empty()) return std::nullopt;
  auto a0 = mat.begin();
  auto b0 = a0->second.begin();
  CRational pivot = b0->second;
  std::set<std::vector<AtomSymbol>> bs;
  for (const auto& [a, row] : mat)
    for (const auto& [b, c] : row) bs.insert(b);
  auto at = [&](const std::vector<AtomSymbol>& a, const std::vector<AtomSymbol>& b) {
    auto it = mat[a].find(b);
    return it == mat[a].end() ? CRational() : it->second;
  };
  Factored f;
  for (const auto& [a, row] : mat) {
    for (const auto& b : bs) {
      if (!(at(a, b) * pivot == at(a, b0->first) * at(a0->first, b))) return std::nullopt;
    }
    Monomial ma;
    ma.atoms = a;
    f.a.add(ma, at(a, b0->first));
  }
  for (const auto& b : bs) {
    Monomial mb;
    mb.atoms = b;
    f.b.add(mb, at(a0->first, b) / pivot);
  }
  return f;
}

OperatorExpr letter(AtomSymbol s) {
  Monomial m;
  m.atoms.push_back(s);
  OperatorExpr e;
  e.add(std::move(m), 1);
  return e;
}

// Returns c with poly == c * candidate, if any.
std::optional<CRational> ratio(const OperatorExpr& poly, const OperatorExpr& candidate) {
  if (poly.size() != candidate.size() || poly.empty()) return std::nullopt;
  const auto& [m0, c0] = *candidate.terms().begin();
  auto it = poly.terms().find(m0);
  if (it == poly.terms().end()) return std::nullopt;
  CRational k = it->second / c0;
  if (!(poly == candidate * k)) return std::nullopt;
  return k;
}

std::vector<AtomSymbol> monopoles(const OperatorExpr& poly) {
  std::set<AtomSymbol> s;
  for (const auto& [m, c] : poly.terms())
    for (const auto& l : m.atoms)
      if (l.op == Op::R2) s.insert(l);
  return {s.begin(), s.end()};
}

bool linked(const std::vector<Kernel>& ks, const AtomSymbol& x, const AtomSymbol& y) {
  for (const auto& k : ks) {
    if (k.kind != KernelKind::FieldC && k.kind != KernelKind::FieldChi) continue;
    bool xa = k.a == x.atom && k.ta == x.time, yb = k.b == y.atom && k.tb == y.time;
    bool xb = k.b == x.atom && k.tb == x.time, ya = k.a == y.atom && k.ta == y.time;
    if ((xa && yb) || (xb && ya)) return true;
  }
  return false;
}

// Integration-by-parts transfer for a term K P_B [x, [y, H_A]] with
// P_B = k [u, v] and v linked to x: half stays, the other half becomes
// K k [u, [v, H_B]] [x, y]. Both halves must yield the same generator.
ReadOff transfer_read_off(const IntegralTerm& t, Site atom) {
  Site other = partner(atom);
  auto f = factor(t.atoms);
  if (!f) throw AlgebraError("two-atom route: term does not factor between the atoms");
  OperatorExpr own = atom == Site::A ? f->a : f->b;
  OperatorExpr pb = atom == Site::A ? f->b : f->a;
  AtomSymbol h{Op::R3, atom, kTau0};
  AtomSymbol hb{Op::R3, other, kTau0};
  auto ms = monopoles(own);
  auto ps = monopoles(pb);
  if (ms.size() != 2 || ps.size() != 2) throw AlgebraError("two-atom route: unexpected letter count");
  for (int swap_own = 0; swap_own < 2; ++swap_own) {
    AtomSymbol x = ms[swap_own], y = ms[1 - swap_own];
    auto ka = ratio(own, commutator(letter(x), commutator(letter(y), letter(h))));
    if (!ka) continue;
    for (int swap_p = 0; swap_p < 2; ++swap_p) {
      AtomSymbol u = ps[swap_p], v = ps[1 - swap_p];
      if (!linked(t.kernels, x, v)) continue;
      auto kb = ratio(pb, commutator(letter(u), letter(v)));
      if (!kb) continue;
      Monomial shell;
      shell.mu = t.mu;
      shell.domain = t.domain;
      shell.kernels = t.kernels;
      const auto& omega = t.atoms.terms().begin()->first.omega;
      shell.omega = omega;
      OperatorExpr base;
      base.add(shell, t.prefactor * CRational(Rational(1, 2)));
      OperatorExpr stay = base * own * pb;
      OperatorExpr moved = base * commutator(letter(u), commutator(letter(v), letter(hb))) *
                           commutator(letter(x), letter(y)) * (*ka * *kb);
      OperatorExpr fixed;
      for (const auto& [m, c] : moved.terms()) {
        Monomial w = m;
        w.omega = omega;
        w.omega[atom_index(atom)] -= 1;
        w.omega[atom_index(other)] += 1;
        fixed.add(std::move(w), c);
      }
      ReadOff r1 = edge_read_off(stay, atom);
      ReadOff r2 = edge_read_off(fixed, other);
      if (!(normal_form(r1.generator - r2.generator).empty()))
        throw AlgebraError("two-atom route: the two halves give different generators");
      r1.interior += r2.interior;
      return r1;
    }
  }
  throw AlgebraError("two-atom route: term is not of the P_B [x, [y, H]] form");
}

}  // namespace

EffectiveHamiltonian effective_hamiltonian_two_atom(Part part, int order) {
  EffectiveHamiltonian h;
  target_power(order);
  if (order == 4 && part == Part::rr)
    throw UnsupportedOrder("two-atom route is implemented for order 2 and for (vf, 4)");
  for (Site xi : {Site::A, Site::B}) {
    OperatorExpr rate = interatomic_rate(xi, part, order, h.remainder);
    if (rate.empty()) continue;
    OperatorExpr generator;
    if (order == 2) {
      // [R2^xi, H_xi] = [R2^xi, H_S] holds term by term only if inserting
      // H of the other atom in place of H_xi gives zero.
      OperatorExpr check = substitute_energy(rate, xi, AtomSymbol{Op::R3, partner(xi), kTau0});
      if (!normal_form(check).empty())
        throw AlgebraError("two-atom route: H_xi cannot be replaced by H_S");
      ReadOff r = edge_read_off(substitute_energy(rate, xi, AtomSymbol{Op::System, Site::X, kTau0}), Site::X);
      h.non_generator += r.interior;
      generator = r.generator;
    } else {
      for (const auto& t : group_terms(rate, xi)) {
        ReadOff r = transfer_read_off(t, xi);
        h.non_generator += r.interior;
        generator += r.generator;
      }
    }
    auto terms = group_terms(generator, xi);
    h.terms.insert(h.terms.end(), terms.begin(), terms.end());
  }
  h.atom_independent = h.terms.empty();
  return h;
}

std::vector<IntegralTerm> ground_state_average(const std::vector<IntegralTerm>& terms) {
  std::vector<IntegralTerm> out;
  for (const auto& t : terms) {
    OperatorExpr avg;
    for (const auto& [m, c] : t.atoms.terms()) {
      std::array<std::vector<int>, 2> times;
      for (const auto& s : m.atoms) {
        if (s.op != Op::R2) throw UnsupportedPattern("average: only R2 letters are supported");
        times[atom_index(s.atom)].push_back(s.time);
      }
      Monomial base;
      base.mu = t.mu;
      base.domain = t.domain;
      base.kernels = t.kernels;
      base.omega = m.omega;
      base.phase = m.phase;
      OperatorExpr value;
      value.add(base, c * t.prefactor);
      for (int ai = 0; ai < 2; ++ai) {
        const auto& ts = times[ai];
        if (ts.empty()) continue;
        if (ts.size() > 2) throw UnsupportedPattern("average: more than two R2 factors of one atom");
        if (ts.size() == 1) {
          value = OperatorExpr();
          break;
        }
        Site s = ai == 0 ? Site::A : Site::B;
        // <g|R2(t1) R2(t2)|g> = C(t1, t2) + chi(t1, t2)
        value = value * (kernel(KernelKind::AtomC, s, ts[0], s, ts[1]) +
                         kernel(KernelKind::AtomChi, s, ts[0], s, ts[1]));
      }
      avg += value;
    }
    auto g = group_terms(avg, t.origin);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

namespace {

std::string word(const std::vector<AtomSymbol>& w) {
  std::string s;
  for (const auto& l : w) s += (s.empty() ? "" : " ") + to_string(l);
  return s.empty() ? "1" : s;
}

// Prints a letters polynomial, spotting [x,y] and {x,y}; returns the scale
// pulled out in front.
std::string pretty(const OperatorExpr& poly, CRational& scale) {
  if (poly.size() == 1) {
    scale = poly.terms().begin()->second;
    return word(poly.terms().begin()->first.atoms);
  }
  if (poly.size() == 2) {
    auto it = poly.terms().begin();
    const auto& [m1, c1] = *it++;
    const auto& [m2, c2] = *it;
    if (m1.atoms.size() == 2 && m2.atoms.size() == 2 && m1.atoms[0] == m2.atoms[1] &&
        m1.atoms[1] == m2.atoms[0]) {
      scale = c1;
      if (c2 == -c1) return "[" + to_string(m1.atoms[0]) + "," + to_string(m1.atoms[1]) + "]";
      if (c2 == c1) return "{" + to_string(m1.atoms[0]) + "," + to_string(m1.atoms[1]) + "}";
    }
  }
  scale = 1;
  std::string s;
  for (const auto& [m, c] : poly.terms()) s += (s.empty() ? "" : " + ") + to_string(c) + " " + word(m.atoms);
  return "(" + s + ")";
}

}  // namespace

std::string format_term(const IntegralTerm& t) {
  std::ostringstream os;
  os << "[" << (t.origin == Site::A ? "A" : "B") << "] ";
  CRational coef = t.prefactor;
  std::string atoms;
  auto f = t.atoms.size() > 1 ? factor(t.atoms) : std::nullopt;
  if (t.atoms.size() == 1 && t.atoms.terms().begin()->first.atoms.empty()) {
    coef *= t.atoms.terms().begin()->second;
  } else if (f) {
    CRational sb, sa;
    std::string pb = pretty(f->b, sb), pa = pretty(f->a, sa);
    coef = coef * sb * sa;
    atoms = pb + " " + pa;
  } else {
    CRational s;
    atoms = pretty(t.atoms, s);
    coef *= s;
  }
  os << to_string(coef) << " mu^" << t.mu;
  const auto& m0 = t.atoms.terms().begin()->first;
  if (m0.omega[0]) os << " wA^" << m0.omega[0];
  if (m0.omega[1]) os << " wB^" << m0.omega[1];
  os << " int{";
  for (std::size_t v = 1; v <= t.domain.size(); ++v)
    os << (v > 1 ? "," : "") << time_name(static_cast<int>(v)) << "<" << time_name(t.domain[v - 1]);
  os << "}";
  for (const auto& k : t.kernels) os << " " << to_string(k);
  if (!atoms.empty()) os << " : " << atoms;
  return os.str();
}

std::string dump(const std::vector<IntegralTerm>& terms) {
  std::string out;
  for (const auto& t : terms) out += format_term(t) + "\n";
  return out;
}

}  // namespace ddc
