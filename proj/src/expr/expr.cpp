#include "pbem/expr.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace pbem {

Index Index::concrete(int v) {
  if (v < 1 || v > 3) throw IndexError("concrete index out of range 1..3: " + std::to_string(v));
  return {Kind::Concrete, v, {}};
}

Index Index::free(std::string n) { return {Kind::Free, 0, std::move(n)}; }

Index Index::dummy(int id) { return {Kind::Dummy, id, {}}; }

namespace {

constexpr std::size_t kMaxBruteForceDummies = 7;

bool key_less(const Term& a, const Term& b) {
  if (a.factors != b.factors) return a.factors < b.factors;
  return a.consts < b.consts;
}

bool key_equal(const Term& a, const Term& b) {
  return a.consts == b.consts && a.factors == b.factors;
}

template <typename Fn>
void for_each_index(Factor& f, Fn&& fn) {
  for (auto& i : f.indices) fn(i);
  for (auto& d : f.derivs)
    if (d.kind != VarKind::Time) fn(d.index);
}

template <typename Fn>
void for_each_index(const Factor& f, Fn&& fn) {
  for (const auto& i : f.indices) fn(i);
  for (const auto& d : f.derivs)
    if (d.kind != VarKind::Time) fn(d.index);
}

template <typename Fn>
void for_each_index(Term& t, Fn&& fn) {
  for (auto& f : t.factors) for_each_index(f, fn);
}

template <typename Fn>
void for_each_index(const Term& t, Fn&& fn) {
  for (const auto& f : t.factors) for_each_index(f, fn);
}

int next_dummy_id(const Term& t) {
  int next = 0;
  for_each_index(t, [&](const Index& i) {
    if (i.is_dummy()) next = std::max(next, i.value + 1);
  });
  return next;
}

// Free names occurring twice become dummies.
void promote_names(Term& t) {
  std::map<std::string, int> names;
  std::map<int, int> dummies;
  for_each_index(t, [&](const Index& i) {
    if (i.is_free()) ++names[i.name];
    if (i.is_dummy()) ++dummies[i.value];
  });
  for (const auto& [id, n] : dummies)
    if (n != 2) throw IndexError("dummy index occurs " + std::to_string(n) + " times in a monomial");
  std::map<std::string, int> promoted;
  int next = next_dummy_id(t);
  for (const auto& [name, n] : names) {
    if (n > 2)
      throw IndexError("index '" + name + "' occurs " + std::to_string(n) + " times in one monomial");
    if (n == 2) promoted[name] = next++;
  }
  if (promoted.empty()) return;
  for_each_index(t, [&](Index& i) {
    if (i.is_free()) {
      auto it = promoted.find(i.name);
      if (it != promoted.end()) i = Index::dummy(it->second);
    }
  });
}

void replace_index(Term& t, const Index& from, const Index& to) {
  for_each_index(t, [&](Index& i) {
    if (i == from) i = to;
  });
}

// Returns false when the term vanishes.
bool simplify_deltas(Term& t) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t p = 0; p < t.factors.size(); ++p) {
      if (t.factors[p].kind != AtomKind::Delta) continue;
      const Index a = t.factors[p].indices[0];
      const Index b = t.factors[p].indices[1];
      if (a.is_concrete() && b.is_concrete()) {
        if (a.value != b.value) return false;
      } else if (a == b) {
        t.coeff *= 3;
      } else if (a.is_dummy() || b.is_dummy()) {
        const Index d = a.is_dummy() ? a : b;
        const Index other = a.is_dummy() ? b : a;
        t.factors.erase(t.factors.begin() + static_cast<std::ptrdiff_t>(p));
        replace_index(t, d, other);
        changed = true;
        break;
      } else {
        continue;
      }
      t.factors.erase(t.factors.begin() + static_cast<std::ptrdiff_t>(p));
      changed = true;
      break;
    }
  }
  return true;
}

int permutation_sign(std::array<int, 3> p) {
  int sign = 1;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

// Returns false when the term vanishes.
bool simplify_epsilons(Term& t) {
  for (std::size_t p = 0; p < t.factors.size();) {
    auto& f = t.factors[p];
    if (f.kind != AtomKind::Epsilon) {
      ++p;
      continue;
    }
    const auto& ix = f.indices;
    if (ix[0] == ix[1] || ix[0] == ix[2] || ix[1] == ix[2]) return false;
    if (ix[0].is_concrete() && ix[1].is_concrete() && ix[2].is_concrete()) {
      t.coeff *= permutation_sign({ix[0].value, ix[1].value, ix[2].value});
      t.factors.erase(t.factors.begin() + static_cast<std::ptrdiff_t>(p));
      continue;
    }
    // two concrete slots fix a summed third one
    const int concrete = static_cast<int>(std::count_if(ix.begin(), ix.end(), [](const Index& i) { return i.is_concrete(); }));
    const auto dummy = std::find_if(ix.begin(), ix.end(), [](const Index& i) { return i.is_dummy(); });
    if (concrete == 2 && dummy != ix.end()) {
      int rest = 6;
      for (const auto& i : ix)
        if (i.is_concrete()) rest -= i.value;
      const Index d = *dummy;
      replace_index(t, d, Index::concrete(rest));
      continue;
    }
    ++p;
  }
  return true;
}

Factor make_delta(Index a, Index b) { return {AtomKind::Delta, FieldFamily::E, {std::move(a), std::move(b)}, {}}; }

// eps(a,b,c) eps(d,e,f) = det[delta(row_i, col_j)].
std::vector<Term> expand_epsilon_pair(const Term& t) {
  std::size_t first = t.factors.size();
  std::size_t second = t.factors.size();
  for (std::size_t p = 0; p < t.factors.size(); ++p) {
    if (t.factors[p].kind != AtomKind::Epsilon) continue;
    if (first == t.factors.size())
      first = p;
    else {
      second = p;
      break;
    }
  }
  const auto rows = t.factors[first].indices;
  const auto cols = t.factors[second].indices;
  Term rest = t;
  rest.factors.erase(rest.factors.begin() + static_cast<std::ptrdiff_t>(second));
  rest.factors.erase(rest.factors.begin() + static_cast<std::ptrdiff_t>(first));

  std::vector<Term> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    Term term = rest;
    term.coeff *= permutation_sign(perm);
    for (int r = 0; r < 3; ++r) term.factors.push_back(make_delta(rows[r], cols[perm[r]]));
    out.push_back(std::move(term));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Sorts index slots inside symmetric/antisymmetric factors and the factor list.
int canonize_factors(std::vector<Factor>& fs) {
  int sign = 1;
  for (auto& f : fs) {
    if (f.kind == AtomKind::Delta) {
      if (f.indices[1] < f.indices[0]) std::swap(f.indices[0], f.indices[1]);
    } else if (f.kind == AtomKind::Epsilon) {
      auto& ix = f.indices;
      for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < 2; ++k)
          if (ix[k + 1] < ix[k]) {
            std::swap(ix[k], ix[k + 1]);
            sign = -sign;
          }
    } else if (!f.derivs.empty()) {
      std::sort(f.derivs.begin(), f.derivs.end());
    }
  }
  std::sort(fs.begin(), fs.end());
  return sign;
}

// Canonical dummy labelling: the lexicographically smallest factor list over all
// relabellings. A relabelling that reproduces the minimum with the opposite sign
// proves the term equals its own negative.
bool label_dummies(Term& t) {
  std::vector<int> ids;
  for_each_index(t, [&](const Index& i) {
    if (i.is_dummy() && std::find(ids.begin(), ids.end(), i.value) == ids.end()) ids.push_back(i.value);
  });
  if (ids.empty()) {
    t.coeff *= canonize_factors(t.factors);
    return true;
  }
  std::map<int, int> compact;
  for (std::size_t k = 0; k < ids.size(); ++k) compact[ids[k]] = static_cast<int>(k);

  std::vector<int> perm(ids.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::optional<std::vector<Factor>> best;
  int best_sign = 1;
  bool conflict = false;
  do {
    std::vector<Factor> fs = t.factors;
    for (auto& f : fs)
      for_each_index(f, [&](Index& i) {
        if (i.is_dummy()) i.value = perm[static_cast<std::size_t>(compact[i.value])];
      });
    const int sign = canonize_factors(fs);
    if (!best || fs < *best) {
      best = std::move(fs);
      best_sign = sign;
      conflict = false;
    } else if (fs == *best && sign != best_sign) {
      conflict = true;
    }
  } while (ids.size() <= kMaxBruteForceDummies && std::next_permutation(perm.begin(), perm.end()));
  if (conflict) return false;
  t.factors = std::move(*best);
  t.coeff *= best_sign;
  return true;
}

std::vector<Term> normalize_term(Term t) {
  std::vector<Term> out;
  std::vector<Term> work{std::move(t)};
  while (!work.empty()) {
    Term term = std::move(work.back());
    work.pop_back();
    if (term.coeff == 0) continue;
    promote_names(term);
    if (!simplify_deltas(term)) continue;
    if (!simplify_epsilons(term)) continue;
    const auto eps_count =
        std::count_if(term.factors.begin(), term.factors.end(), [](const Factor& f) { return f.kind == AtomKind::Epsilon; });
    if (eps_count >= 2) {
      for (auto& e : expand_epsilon_pair(term)) work.push_back(std::move(e));
      continue;
    }
    if (!label_dummies(term)) continue;
    if (term.coeff != 0) out.push_back(std::move(term));
  }
  return out;
}

// Sorts canonical terms by key and merges like terms.
std::vector<Term> combine(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), key_less);
  std::vector<Term> out;
  for (auto& t : terms) {
    if (!out.empty() && key_equal(out.back(), t)) {
      out.back().coeff += t.coeff;
      if (out.back().coeff == 0) out.pop_back();
    } else if (t.coeff != 0) {
      out.push_back(std::move(t));
    }
  }
  return out;
}

Factor plain(AtomKind kind, std::vector<Index> indices) { return {kind, FieldFamily::E, std::move(indices), {}}; }

}  // namespace

// --- construction ------------------------------------------------------------

Expr::Expr(long n) : Expr(Rational(n)) {}

Expr::Expr(const Rational& r) {
  if (r != 0) terms_.push_back(Term{r, {}, {}});
}

Expr Expr::rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return Expr(r);
}

Expr Expr::constant(const Rational& r, ConstPowers consts) {
  Expr out;
  if (r != 0) out.terms_.push_back(Term{r, consts, {}});
  return out;
}

Expr Expr::charge() { return constant(1, {1, 0, 0}); }
Expr Expr::mass() { return constant(1, {0, 1, 0}); }
Expr Expr::light_speed() { return constant(1, {0, 0, 1}); }

Expr Expr::from_factor(Factor f) {
  Term t;
  t.factors.push_back(std::move(f));
  return from_terms({std::move(t)});
}

Expr Expr::time() { return from_factor(plain(AtomKind::Time, {})); }
Expr Expr::q(Index i) { return from_factor(plain(AtomKind::Coordinate, {std::move(i)})); }
Expr Expr::v(Index i) { return from_factor(plain(AtomKind::Velocity, {std::move(i)})); }
Expr Expr::x(Index i) { return from_factor(plain(AtomKind::SpatialVar, {std::move(i)})); }
Expr Expr::accel(Index i) { return from_factor(plain(AtomKind::Acceleration, {std::move(i)})); }

Expr Expr::field(FieldFamily family, Index i) {
  if (family != FieldFamily::E && family != FieldFamily::B && family != FieldFamily::A)
    throw std::invalid_argument("vector field family expected");
  return from_factor({AtomKind::Field, family, {std::move(i)}, {}});
}

Expr Expr::scalar_field(FieldFamily family) {
  if (family == FieldFamily::E || family == FieldFamily::B || family == FieldFamily::A)
    throw std::invalid_argument("scalar field family expected");
  return from_factor({AtomKind::ScalarField, family, {}, {}});
}

Expr Expr::delta(Index i, Index j) { return from_factor(make_delta(std::move(i), std::move(j))); }

Expr Expr::epsilon(Index i, Index j, Index k) {
  return from_factor(plain(AtomKind::Epsilon, {std::move(i), std::move(j), std::move(k)}));
}

Expr Expr::from_terms(std::vector<Term> raw) {
  std::vector<Term> canon;
  for (auto& t : raw)
    for (auto& n : normalize_term(std::move(t))) canon.push_back(std::move(n));
  Expr out;
  out.terms_ = combine(std::move(canon));
  return out;
}

bool Expr::is_constant() const { return terms_.size() == 1 && terms_[0].factors.empty(); }

// --- arithmetic --------------------------------------------------------------

Expr operator+(const Expr& a, const Expr& b) {
  std::vector<Term> all = a.terms_;
  all.insert(all.end(), b.terms_.begin(), b.terms_.end());
  Expr out;
  out.terms_ = combine(std::move(all));
  return out;
}

Expr Expr::operator-() const {
  Expr out = *this;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Term> raw;
  raw.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    const int shift = next_dummy_id(ta);
    for (const auto& tb : b.terms_) {
      Term t;
      t.coeff = ta.coeff * tb.coeff;
      t.consts = ta.consts + tb.consts;
      t.factors = ta.factors;
      for (Factor f : tb.factors) {
        for_each_index(f, [&](Index& i) {
          if (i.is_dummy()) i.value += shift;
        });
        t.factors.push_back(std::move(f));
      }
      raw.push_back(std::move(t));
    }
  }
  // Factor-free products are already canonical; skip the normalizer for them.
  bool trivial = std::all_of(raw.begin(), raw.end(), [](const Term& t) { return t.factors.empty(); });
  if (trivial) {
    Expr out;
    out.terms_ = combine(std::move(raw));
    return out;
  }
  return Expr::from_terms(std::move(raw));
}

Expr Expr::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  Expr out(1L);
  for (int k = 0; k < n; ++k) out = out * *this;
  return out;
}

Expr Expr::inverse() const {
  if (!is_constant()) throw std::domain_error("only constant monomials can be inverted");
  Expr out = *this;
  out.terms_[0].coeff = 1 / terms_[0].coeff;
  out.terms_[0].consts = -terms_[0].consts;
  return out;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t k = 0; k < a.terms_.size(); ++k)
    if (!key_equal(a.terms_[k], b.terms_[k]) || a.terms_[k].coeff != b.terms_[k].coeff) return false;
  return true;
}

// --- index utilities ---------------------------------------------------------

std::set<std::string> free_index_names(const Expr& x) {
  std::set<std::string> out;
  for (const auto& t : x.terms())
    for_each_index(t, [&](const Index& i) {
      if (i.is_free()) out.insert(i.name);
    });
  return out;
}

bool has_symbolic_indices(const Expr& x) {
  bool found = false;
  for (const auto& t : x.terms())
    for_each_index(t, [&](const Index& i) { found = found || !i.is_concrete(); });
  return found;
}

Expr rename_index(const Expr& x, const std::string& name, const Index& to) {
  if (to.is_dummy()) throw IndexError("cannot rename a free index to a dummy");
  std::vector<Term> raw = x.terms();
  for (auto& t : raw)
    for_each_index(t, [&](Index& i) {
      if (i.is_free() && i.name == name) i = to;
    });
  return Expr::from_terms(std::move(raw));
}

Expr instantiate(const Expr& x, const std::string& name, int value) {
  return rename_index(x, name, Index::concrete(value));
}

Expr expand_dummies(const Expr& x) {
  std::vector<Term> out;
  std::vector<Term> work = x.terms();
  while (!work.empty()) {
    Term t = std::move(work.back());
    work.pop_back();
    std::optional<Index> dummy;
    for_each_index(t, [&](const Index& i) {
      if (!dummy && i.is_dummy()) dummy = i;
    });
    if (!dummy) {
      out.push_back(std::move(t));
      continue;
    }
    for (int v = 1; v <= 3; ++v) {
      Term copy = t;
      replace_index(copy, *dummy, Index::concrete(v));
      work.push_back(std::move(copy));
    }
  }
  return Expr::from_terms(std::move(out));
}

Expr to_components(const Expr& x) {
  Expr out = expand_dummies(x);
  const auto names = free_index_names(out);
  if (!names.empty()) throw IndexError("free index '" + *names.begin() + "' has no value");
  return out;
}

bool vanishes(const Expr& x) {
  if (x.is_zero()) return true;
  const auto names = free_index_names(x);
  std::vector<std::string> ns(names.begin(), names.end());
  std::vector<Expr> work{expand_dummies(x)};
  for (const auto& n : ns) {
    std::vector<Expr> next;
    for (const auto& w : work)
      for (int v = 1; v <= 3; ++v) next.push_back(instantiate(w, n, v));
    work = std::move(next);
  }
  return std::all_of(work.begin(), work.end(), [](const Expr& e) { return e.is_zero(); });
}

bool equivalent(const Expr& a, const Expr& b) { return vanishes(a - b); }

std::optional<Expr> proportionality(const Expr& x, const Expr& y) {
  if (y.is_zero() || x.is_zero()) return std::nullopt;
  const Term& tx = x.terms().front();
  const Term& ty = y.terms().front();
  if (tx.factors != ty.factors) return std::nullopt;
  Rational k = tx.coeff / ty.coeff;
  ConstPowers kc{tx.consts.e - ty.consts.e, tx.consts.m - ty.consts.m, tx.consts.c - ty.consts.c};
  Expr factor = Expr::constant(k, kc);
  if (factor * y == x) return factor;
  return std::nullopt;
}

Expr map_factors(const Expr& x, const std::function<Expr(const Factor&)>& fn) {
  Expr sum;
  for (const auto& t : x.terms()) {
    Expr product = Expr::constant(t.coeff, t.consts);
    for (Factor f : t.factors) {
      for_each_index(f, [](Index& i) {
        if (i.is_dummy()) i = Index::free("%d" + std::to_string(i.value));
      });
      product = product * fn(f);
      if (product.is_zero()) break;
    }
    sum += product;
  }
  for (const auto& n : free_index_names(sum))
    if (n.starts_with("%")) throw std::logic_error("map_factors dropped a contracted index");
  return sum;
}

bool contains(const Expr& x, const std::function<bool(const Factor&)>& pred) {
  for (const auto& t : x.terms())
    for (const auto& f : t.factors)
      if (pred(f)) return true;
  return false;
}

namespace {
AtomKind atom_of(VarKind k) {
  switch (k) {
    case VarKind::Time: return AtomKind::Time;
    case VarKind::Coordinate: return AtomKind::Coordinate;
    case VarKind::SpatialVar: return AtomKind::SpatialVar;
    case VarKind::Velocity: return AtomKind::Velocity;
    case VarKind::Acceleration: return AtomKind::Acceleration;
  }
  return AtomKind::Time;
}

Expr swap_space(const Expr& x, VarKind from, VarKind to) {
  const AtomKind from_atom = atom_of(from);
  const AtomKind to_atom = atom_of(to);
  std::vector<Term> raw = x.terms();
  for (auto& t : raw)
    for (auto& f : t.factors) {
      if (f.kind == from_atom) f.kind = to_atom;
      for (auto& d : f.derivs)
        if (d.kind == from) d.kind = to;
    }
  return Expr::from_terms(std::move(raw));
}
}  // namespace

bool depends_on(const Expr& x, VarKind kind) {
  const AtomKind atom = atom_of(kind);
  return contains(x, [&](const Factor& f) { return f.kind == atom; });
}

bool contains_fields(const Expr& x) {
  return contains(x, [](const Factor& f) { return f.kind == AtomKind::Field || f.kind == AtomKind::ScalarField; });
}

Expr to_field_space(const Expr& x) { return swap_space(x, VarKind::Coordinate, VarKind::SpatialVar); }
Expr to_phase_space(const Expr& x) { return swap_space(x, VarKind::SpatialVar, VarKind::Coordinate); }

// --- printing ----------------------------------------------------------------

std::string family_name(FieldFamily f) {
  switch (f) {
    case FieldFamily::E: return "E";
    case FieldFamily::B: return "B";
    case FieldFamily::A: return "A";
    case FieldFamily::A0: return "A0";
    case FieldFamily::U: return "U";
    case FieldFamily::F: return "f";
  }
  return "?";
}

namespace {

class Printer {
 public:
  explicit Printer(const std::set<std::string>& reserved) {
    static const char* pool[] = {"k", "l", "n", "p", "r", "s", "u", "w", "i", "j", "g", "h"};
    for (const char* p : pool)
      if (!reserved.contains(p)) names_.emplace_back(p);
    for (int k = 1; names_.size() < 24; ++k) {
      std::string n = "k" + std::to_string(k);
      if (!reserved.contains(n)) names_.push_back(n);
    }
  }

  std::string index(const Index& i) const {
    switch (i.kind) {
      case Index::Kind::Concrete: return std::to_string(i.value);
      case Index::Kind::Free: return i.name;
      case Index::Kind::Dummy:
        return static_cast<std::size_t>(i.value) < names_.size() ? names_[static_cast<std::size_t>(i.value)]
                                                                  : "k" + std::to_string(100 + i.value);
    }
    return "?";
  }

  // "q1" or "q_i"
  std::string indexed(const std::string& base, const Index& i) const {
    return i.is_concrete() ? base + index(i) : base + "_" + index(i);
  }

  std::string variable(const Variable& v) const {
    switch (v.kind) {
      case VarKind::Time: return "t";
      case VarKind::Coordinate: return indexed("q", v.index);
      case VarKind::SpatialVar: return indexed("x", v.index);
      case VarKind::Velocity: return indexed("v", v.index);
      case VarKind::Acceleration: return indexed("a", v.index);
    }
    return "?";
  }

  std::string factor(const Factor& f) const {
    switch (f.kind) {
      case AtomKind::Delta: return "delta(" + index(f.indices[0]) + "," + index(f.indices[1]) + ")";
      case AtomKind::Epsilon:
        return "eps(" + index(f.indices[0]) + "," + index(f.indices[1]) + "," + index(f.indices[2]) + ")";
      case AtomKind::Time: return "t";
      case AtomKind::Coordinate: return indexed("q", f.indices[0]);
      case AtomKind::SpatialVar: return indexed("x", f.indices[0]);
      case AtomKind::Velocity: return indexed("v", f.indices[0]);
      case AtomKind::Acceleration: return indexed("a", f.indices[0]);
      case AtomKind::Field:
      case AtomKind::ScalarField: {
        std::string base =
            f.kind == AtomKind::Field ? indexed(family_name(f.family), f.indices[0]) : family_name(f.family);
        if (f.derivs.empty()) return base;
        std::string out = "diff(" + base;
        for (const auto& d : f.derivs) out += "," + variable(d);
        return out + ")";
      }
    }
    return "?";
  }

 private:
  std::vector<std::string> names_;
};

bool all_concrete(const Factor& f) {
  bool ok = true;
  for_each_index(f, [&](const Index& i) { ok = ok && i.is_concrete(); });
  return ok;
}

void append_power(std::vector<std::string>& parts, const std::string& base, int exp) {
  if (exp == 0) return;
  parts.push_back(exp == 1 ? base : base + "^" + std::to_string(exp));
}

}  // namespace

std::string Expr::str() const {
  if (terms_.empty()) return "0";
  Printer printer(free_index_names(*this));
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    const bool negative = t.coeff < 0;
    Rational mag = abs(t.coeff);
    std::vector<std::string> parts;
    append_power(parts, "e", t.consts.e);
    append_power(parts, "m", t.consts.m);
    append_power(parts, "c", t.consts.c);
    for (std::size_t k = 0; k < t.factors.size();) {
      const Factor& f = t.factors[k];
      std::size_t run = 1;
      if (all_concrete(f))
        while (k + run < t.factors.size() && t.factors[k + run] == f) ++run;
      append_power(parts, printer.factor(f), static_cast<int>(run));
      k += run;
    }
    std::string body;
    if (mag != 1 || parts.empty()) body = mag.get_str();
    for (const auto& p : parts) body += (body.empty() ? "" : "*") + p;
    if (first)
      out << (negative ? "-" : "") << body;
    else
      out << (negative ? " - " : " + ") << body;
    first = false;
  }
  return out.str();
}

std::string str(const VectorField& v) { return v[0].str() + "; " + v[1].str() + "; " + v[2].str(); }

}  // namespace pbem
