#include "ddc/expr.h"

#include <algorithm>
#include <functional>
#include <sstream>

namespace ddc {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string to_string(const CRational& c) {
  if (c.im.numerator() == 0) return to_string(c.re);
  if (c.re.numerator() == 0) return to_string(c.im) + "i";
  std::string im = to_string(c.im);
  if (c.im.numerator() > 0) im = "+" + im;
  return "(" + to_string(c.re) + im + "i)";
}

bool is_symmetric(KernelKind k) { return k == KernelKind::FieldC || k == KernelKind::AtomC; }

std::pair<Kernel, int> make_kernel(KernelKind kind, Site a, int ta, Site b, int tb) {
  auto ka = std::make_pair(a, ta);
  auto kb = std::make_pair(b, tb);
  if (ka == kb) {
    return {Kernel{kind, a, ta, b, tb}, is_symmetric(kind) ? 1 : 0};
  }
  if (kb < ka) return {Kernel{kind, b, tb, a, ta}, is_symmetric(kind) ? 1 : -1};
  return {Kernel{kind, a, ta, b, tb}, 1};
}

void tidy(Monomial& m) {
  std::sort(m.kernels.begin(), m.kernels.end());
  std::map<std::pair<int, Site>, int> ph;
  for (const auto& p : m.phase) ph[{p.time, p.atom}] += p.power;
  m.phase.clear();
  for (const auto& [k, v] : ph)
    if (v != 0) m.phase.push_back({k.first, k.second, v});
}

int relabel(Monomial& m, const std::vector<int>& map) {
  auto f = [&](int t) { return t > 0 ? map[t] : t; };
  for (auto& s : m.atoms) s.time = f(s.time);
  for (auto& s : m.fields) s.time = f(s.time);
  int sign = 1;
  for (auto& k : m.kernels) {
    auto [nk, s] = make_kernel(k.kind, k.a, f(k.ta), k.b, f(k.tb));
    k = nk;
    sign *= s;
  }
  for (auto& p : m.phase) p.time = f(p.time);
  std::vector<int> dom(m.domain.size());
  for (std::size_t v = 1; v <= m.domain.size(); ++v)
    if (map[v] < 1 || map[v] > static_cast<int>(dom.size())) throw AlgebraError("relabel: map is not a permutation");
  for (std::size_t v = 1; v <= m.domain.size(); ++v) dom[map[v] - 1] = f(m.domain[v - 1]);
  m.domain = std::move(dom);
  tidy(m);
  return sign;
}

namespace {

Monomial concat_signed(const Monomial& l, const Monomial& r, int& sign) {
  Monomial out = l;
  Monomial rr = r;
  int n = l.num_vars();
  sign = 1;
  if (n > 0 && rr.num_vars() > 0) {
    // relabel only permutes, so shift the domain by hand
    std::vector<int> dom = rr.domain;
    std::vector<int> map(dom.size() + 1);
    for (std::size_t v = 1; v <= dom.size(); ++v) map[v] = static_cast<int>(v) + n;
    rr.domain.clear();
    sign = relabel(rr, map);
    for (int p : dom) rr.domain.push_back(p > 0 ? p + n : p);
  }
  out.mu += rr.mu;
  out.omega[0] += rr.omega[0];
  out.omega[1] += rr.omega[1];
  out.atoms.insert(out.atoms.end(), rr.atoms.begin(), rr.atoms.end());
  out.fields.insert(out.fields.end(), rr.fields.begin(), rr.fields.end());
  out.kernels.insert(out.kernels.end(), rr.kernels.begin(), rr.kernels.end());
  out.domain.insert(out.domain.end(), rr.domain.begin(), rr.domain.end());
  out.phase.insert(out.phase.end(), rr.phase.begin(), rr.phase.end());
  tidy(out);
  return out;
}

}  // namespace

Monomial concat(const Monomial& l, const Monomial& r) {
  int sign = 1;
  Monomial m = concat_signed(l, r, sign);
  if (sign != 1) throw AlgebraError("concat: unexpected kernel reorientation");
  return m;
}

OperatorExpr OperatorExpr::scalar(CRational c) {
  OperatorExpr e;
  e.add(Monomial{}, c);
  return e;
}

OperatorExpr OperatorExpr::atom(Op op, Site atom, int time) {
  Monomial m;
  m.atoms.push_back({op, atom, time});
  OperatorExpr e;
  e.add(std::move(m), 1);
  return e;
}

OperatorExpr OperatorExpr::field(Site site, int time) {
  Monomial m;
  m.fields.push_back({site, time});
  OperatorExpr e;
  e.add(std::move(m), 1);
  return e;
}

void OperatorExpr::add(const Monomial& m, const CRational& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

void OperatorExpr::add(Monomial&& m, const CRational& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

OperatorExpr& OperatorExpr::operator+=(const OperatorExpr& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  for (const auto& [k, v] : o.remainder) remainder[k] += v;
  return *this;
}

OperatorExpr& OperatorExpr::operator-=(const OperatorExpr& o) {
  for (const auto& [m, c] : o.terms_) add(m, -c);
  for (const auto& [k, v] : o.remainder) remainder[k] += v;
  return *this;
}

OperatorExpr& OperatorExpr::operator*=(const CRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  OperatorExpr out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      int sign = 1;
      Monomial m = concat_signed(ma, mb, sign);
      out.add(std::move(m), ca * cb * CRational(sign));
    }
  }
  return out;
}

OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b) { return a * b - b * a; }

OperatorExpr anticommutator(const OperatorExpr& a, const OperatorExpr& b) {
  return a * b + b * a;
}

int monopole_power(const Monomial& m, Site atom) {
  return static_cast<int>(std::count_if(m.atoms.begin(), m.atoms.end(), [&](const AtomSymbol& s) {
    return s.op == Op::R2 && s.atom == atom;
  }));
}

namespace {

// All orderings of the variables, latest first, compatible with the bounds.
void linear_extensions(const std::vector<int>& dom, std::vector<int>& cur, std::vector<bool>& used,
                       std::vector<std::vector<int>>& out) {
  int n = static_cast<int>(dom.size());
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int v = 1; v <= n; ++v) {
    if (used[v]) continue;
    int p = dom[v - 1];
    if (p != 0 && !used[p]) continue;
    used[v] = true;
    cur.push_back(v);
    linear_extensions(dom, cur, used, out);
    cur.pop_back();
    used[v] = false;
  }
}

bool is_chain(const std::vector<int>& dom) {
  for (std::size_t v = 1; v <= dom.size(); ++v)
    if (dom[v - 1] != static_cast<int>(v) - 1) return false;
  return true;
}

}  // namespace

void sort_atom_letters(std::vector<AtomSymbol>& atoms) {
  auto begin = atoms.begin();
  while (begin != atoms.end()) {
    auto end = std::find_if(begin, atoms.end(), [](const AtomSymbol& s) { return s.op == Op::System; });
    std::stable_sort(begin, end, [](const AtomSymbol& x, const AtomSymbol& y) { return x.atom < y.atom; });
    if (end == atoms.end()) break;
    begin = end + 1;
  }
}

namespace {

void order_fields(Monomial m, CRational c, OperatorExpr& out) {
  for (std::size_t i = 0; i + 1 < m.fields.size(); ++i) {
    if (m.fields[i + 1] < m.fields[i]) {
      // f_i f_{i+1} = f_{i+1} f_i + 2 chi^F(f_i, f_{i+1})
      Monomial contracted = m;
      auto [k, s] = make_kernel(KernelKind::FieldChi, m.fields[i].site, m.fields[i].time,
                                m.fields[i + 1].site, m.fields[i + 1].time);
      contracted.fields.erase(contracted.fields.begin() + static_cast<long>(i),
                              contracted.fields.begin() + static_cast<long>(i) + 2);
      contracted.kernels.push_back(k);
      tidy(contracted);
      if (s != 0) order_fields(std::move(contracted), c * CRational(2 * s), out);
      std::swap(m.fields[i], m.fields[i + 1]);
      order_fields(std::move(m), c, out);
      return;
    }
  }
  out.add(std::move(m), c);
}

}  // namespace

OperatorExpr expand_chains(const OperatorExpr& e) {
  OperatorExpr out;
  for (const auto& [m, c] : e.terms()) {
    if (is_chain(m.domain)) {
      out.add(m, c);
      continue;
    }
    std::vector<std::vector<int>> orders;
    std::vector<int> cur;
    std::vector<bool> used(m.domain.size() + 1, false);
    linear_extensions(m.domain, cur, used, orders);
    for (const auto& ord : orders) {
      std::vector<int> map(m.domain.size() + 1, 0);
      for (std::size_t k = 0; k < ord.size(); ++k) map[ord[k]] = static_cast<int>(k) + 1;
      Monomial mm = m;
      int s = relabel(mm, map);
      for (std::size_t v = 1; v <= mm.domain.size(); ++v) mm.domain[v - 1] = static_cast<int>(v) - 1;
      out.add(std::move(mm), c * CRational(s));
    }
  }
  out.remainder = e.remainder;
  return out;
}

OperatorExpr normal_form(const OperatorExpr& e) {
  OperatorExpr chains = expand_chains(e);
  OperatorExpr out;
  for (const auto& [key, c] : chains.terms()) {
    Monomial m = key;
    sort_atom_letters(m.atoms);
    tidy(m);
    order_fields(std::move(m), c, out);
  }
  out.remainder = e.remainder;
  return out;
}

namespace {

// su(2) basis for one atom.
enum class Su2 : std::uint8_t { I, P, M, Z };

struct Su2Product {
  Rational a;
  Su2 x;
  Rational b = 0;
  Su2 y = Su2::I;
};

// x * y = a X (+ b Y)
Su2Product su2_mul(Su2 x, Su2 y) {
  using R = Rational;
  if (x == Su2::I) return {R(1), y};
  if (y == Su2::I) return {R(1), x};
  switch (x) {
    case Su2::P:
      if (y == Su2::P) return {R(0), Su2::I};
      if (y == Su2::M) return {R(1, 2), Su2::I, R(1), Su2::Z};
      return {R(-1, 2), Su2::P};
    case Su2::M:
      if (y == Su2::M) return {R(0), Su2::I};
      if (y == Su2::P) return {R(1, 2), Su2::I, R(-1), Su2::Z};
      return {R(1, 2), Su2::M};
    case Su2::Z:
      if (y == Su2::Z) return {R(1, 4), Su2::I};
      if (y == Su2::P) return {R(1, 2), Su2::P};
      return {R(-1, 2), Su2::M};
    default:
      return {R(0), Su2::I};
  }
}

struct Branch {
  CRational c;
  Monomial m;
  std::array<Su2, 2> el{Su2::I, Su2::I};
};

Op su2_op(Su2 s) {
  switch (s) {
    case Su2::P: return Op::Raise;
    case Su2::M: return Op::Lower;
    default: return Op::R3;
  }
}

void push_letter(std::vector<Branch>& next, const Branch& b, int ai, Su2 s, CRational c,
                 int time, int power, Site atom) {
  Su2Product p = su2_mul(b.el[ai], s);
  for (int k = 0; k < 2; ++k) {
    Rational r = k == 0 ? p.a : p.b;
    if (r.numerator() == 0) continue;
    Branch nb = b;
    nb.c = b.c * c * CRational(r);
    nb.el[ai] = k == 0 ? p.x : p.y;
    if (power != 0 && time != kTau0) nb.m.phase.push_back({time, atom, power});
    next.push_back(std::move(nb));
  }
}

}  // namespace

OperatorExpr canonicalize(const OperatorExpr& e) {
  OperatorExpr nf = normal_form(e);
  OperatorExpr out;
  const CRational half_i(Rational(0), Rational(1, 2));
  for (const auto& [m, c] : nf.terms()) {
    Branch seed{c, m};
    seed.m.atoms.clear();
    std::vector<Branch> cur{seed};
    for (const auto& s : m.atoms) {
      std::vector<Branch> next;
      for (const auto& b : cur) {
        switch (s.op) {
          case Op::R2: {
            // R2 = (i/2)(R- - R+)
            int ai = atom_index(s.atom);
            push_letter(next, b, ai, Su2::M, half_i, s.time, -1, s.atom);
            push_letter(next, b, ai, Su2::P, -half_i, s.time, 1, s.atom);
            break;
          }
          case Op::Raise:
            push_letter(next, b, atom_index(s.atom), Su2::P, 1, s.time, 1, s.atom);
            break;
          case Op::Lower:
            push_letter(next, b, atom_index(s.atom), Su2::M, 1, s.time, -1, s.atom);
            break;
          case Op::R3:
            push_letter(next, b, atom_index(s.atom), Su2::Z, 1, s.time, 0, s.atom);
            break;
          case Op::System:
            for (Site a : {Site::A, Site::B}) {
              std::size_t before = next.size();
              push_letter(next, b, atom_index(a), Su2::Z, 1, s.time, 0, a);
              for (std::size_t k = before; k < next.size(); ++k) next[k].m.omega[atom_index(a)] += 1;
            }
            break;
        }
      }
      cur = std::move(next);
    }
    for (auto& b : cur) {
      for (int ai = 0; ai < 2; ++ai) {
        if (b.el[ai] != Su2::I)
          b.m.atoms.push_back({su2_op(b.el[ai]), ai == 0 ? Site::A : Site::B, kTau0});
      }
      tidy(b.m);
      out.add(std::move(b.m), b.c);
    }
  }
  return out;
}

OperatorExpr adjoint(const OperatorExpr& e) {
  OperatorExpr out;
  for (const auto& [m, c] : e.terms()) {
    Monomial a = m;
    std::reverse(a.atoms.begin(), a.atoms.end());
    for (auto& s : a.atoms) {
      if (s.op == Op::Raise)
        s.op = Op::Lower;
      else if (s.op == Op::Lower)
        s.op = Op::Raise;
    }
    std::reverse(a.fields.begin(), a.fields.end());
    int sign = 1;
    for (const auto& k : a.kernels)
      if (!is_symmetric(k.kind)) sign = -sign;
    for (auto& p : a.phase) p.power = -p.power;
    out.add(std::move(a), c.conj() * CRational(sign));
  }
  return out;
}

bool is_hermitian(const OperatorExpr& e) { return canonicalize(adjoint(e)) == canonicalize(e); }

OperatorExpr swap_atoms(const OperatorExpr& e) {
  auto sw = [](Site s) { return s == Site::X ? s : partner(s); };
  OperatorExpr out;
  for (const auto& [m, c] : e.terms()) {
    Monomial a = m;
    for (auto& s : a.atoms)
      if (s.op != Op::System) s.atom = sw(s.atom);
    for (auto& f : a.fields) f.site = sw(f.site);
    int sign = 1;
    for (auto& k : a.kernels) {
      auto [nk, s] = make_kernel(k.kind, sw(k.a), k.ta, sw(k.b), k.tb);
      k = nk;
      sign *= s;
    }
    std::swap(a.omega[0], a.omega[1]);
    for (auto& p : a.phase) p.atom = sw(p.atom);
    tidy(a);
    out.add(std::move(a), c * CRational(sign));
  }
  return out;
}

OperatorExpr r2(Site atom, int time) { return OperatorExpr::atom(Op::R2, atom, time); }
OperatorExpr r3(Site atom) { return OperatorExpr::atom(Op::R3, atom, kTau0); }
OperatorExpr phi(Site site, int time) { return OperatorExpr::field(site, time); }

OperatorExpr kernel(KernelKind kind, Site a, int ta, Site b, int tb) {
  auto [k, s] = make_kernel(kind, a, ta, b, tb);
  Monomial m;
  m.kernels.push_back(k);
  OperatorExpr e;
  e.add(std::move(m), CRational(s));
  return e;
}

OperatorExpr integrate(const OperatorExpr& e, const std::vector<int>& bounds, int mu) {
  OperatorExpr out;
  for (const auto& [m, c] : e.terms()) {
    if (!m.domain.empty()) throw AlgebraError("integrate: operand already has a domain");
    Monomial mm = m;
    mm.domain = bounds;
    mm.mu += mu;
    out.add(std::move(mm), c);
  }
  return out;
}

namespace {

std::string site_name(Site s) { return s == Site::A ? "A" : s == Site::B ? "B" : "x"; }

}  // namespace

std::string time_name(int t) {
  if (t == kTau) return "tau";
  if (t == kTau0) return "tau0";
  return "t" + std::to_string(t);
}

std::string to_string(const AtomSymbol& s) {
  switch (s.op) {
    case Op::R2: return "R2" + site_name(s.atom) + "(" + time_name(s.time) + ")";
    case Op::R3: return "R3" + site_name(s.atom);
    case Op::Raise: return "R+" + site_name(s.atom);
    case Op::Lower: return "R-" + site_name(s.atom);
    case Op::System: return "HS";
  }
  return "?";
}

std::string to_string(const Kernel& k) {
  std::string name;
  switch (k.kind) {
    case KernelKind::FieldC: name = "CF"; break;
    case KernelKind::FieldChi: name = "chiF"; break;
    case KernelKind::AtomC: name = "C" + site_name(k.a); break;
    case KernelKind::AtomChi: name = "chi" + site_name(k.a); break;
  }
  bool field = k.kind == KernelKind::FieldC || k.kind == KernelKind::FieldChi;
  auto arg = [&](Site s, int t) { return field ? site_name(s) + "@" + time_name(t) : time_name(t); };
  return name + "(" + arg(k.a, k.ta) + "," + arg(k.b, k.tb) + ")";
}

std::string to_string(const Monomial& m) {
  std::ostringstream os;
  if (m.mu) os << "mu^" << m.mu << " ";
  if (m.omega[0]) os << "wA^" << m.omega[0] << " ";
  if (m.omega[1]) os << "wB^" << m.omega[1] << " ";
  for (const auto& p : m.phase)
    os << "e^{" << p.power << "i w" << site_name(p.atom) << " (" << time_name(p.time) << "-tau0)} ";
  for (const auto& k : m.kernels) os << to_string(k) << " ";
  for (const auto& s : m.atoms) os << to_string(s) << " ";
  for (const auto& f : m.fields) os << "phi(" << site_name(f.site) << "@" << time_name(f.time) << ") ";
  if (!m.domain.empty()) {
    os << "{";
    for (std::size_t v = 1; v <= m.domain.size(); ++v)
      os << (v > 1 ? "," : "") << time_name(static_cast<int>(v)) << "<" << time_name(m.domain[v - 1]);
    os << "}";
  }
  std::string s = os.str();
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s.empty() ? "1" : s;
}

std::string to_string(const OperatorExpr& e) {
  if (e.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    os << (first ? "" : "\n+ ") << to_string(c) << " * " << to_string(m);
    first = false;
  }
  return os.str();
}

}  // namespace ddc
