#include "asep/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace asep {

Perm Perm::identity(int n) {
  Perm p;
  p.img.resize(n);
  std::iota(p.img.begin(), p.img.end(), 0);
  return p;
}

bool Perm::valid() const {
  std::vector<bool> seen(img.size(), false);
  for (int v : img) {
    if (v < 0 || v >= n() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Perm Perm::after(const Perm& inner) const {
  if (n() != inner.n()) throw std::invalid_argument("composing permutations of different sizes");
  Perm r;
  r.img.resize(n());
  for (int i = 0; i < n(); ++i) r.img[i] = img[inner.img[i]];
  return r;
}

Perm Perm::inverse() const {
  Perm r;
  r.img.resize(n());
  for (int i = 0; i < n(); ++i) r.img[img[i]] = i;
  return r;
}

std::string Perm::cycle_string() const {
  std::string s;
  std::vector<bool> seen(img.size(), false);
  for (int i = 0; i < n(); ++i) {
    if (seen[i] || img[i] == i) continue;
    s += "(";
    int j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = true;
      if (!first) s += " ";
      s += std::to_string(j);
      first = false;
      j = img[j];
    }
    s += ")";
  }
  return s.empty() ? "id" : s;
}

SolutionPoint apply(const Perm& pi, const SolutionPoint& x) {
  if (pi.n() != x.n) throw std::invalid_argument("permutation size mismatch");
  SolutionPoint y;
  y.n = x.n;
  y.x.assign(x.x.size(), Rat(0));
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      if (i == j) continue;
      y.at(pi(i), pi(j)) = x.at(i, j);
    }
  return y;
}

namespace {

// Entries compressed to ranks of the sorted distinct values, so the lex
// search compares small ints instead of rationals.
struct CodedMatrix {
  int n;
  std::vector<uint8_t> code;  // n*n, diagonal unused
  std::vector<Rat> values;    // rank -> value

  explicit CodedMatrix(const SolutionPoint& x) : n(x.n), code(static_cast<size_t>(x.n) * x.n, 0) {
    std::set<Rat> distinct(x.x.begin(), x.x.end());
    values.assign(distinct.begin(), distinct.end());
    if (values.size() > 200) throw std::runtime_error("too many distinct entries");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const Rat& q = x.at(i, j);
        const size_t r = std::lower_bound(values.begin(), values.end(), q) - values.begin();
        code[static_cast<size_t>(i) * n + j] = static_cast<uint8_t>(r);
      }
  }

  uint8_t at(int i, int j) const { return code[static_cast<size_t>(i) * n + j]; }

  // Row-major off-diagonal flattening under relabeling sigma (new -> orig).
  std::vector<uint8_t> flatten(const std::vector<int>& sigma) const {
    std::vector<uint8_t> f;
    f.reserve(static_cast<size_t>(n) * (n - 1));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        f.push_back(at(sigma[a], sigma[b]));
      }
    return f;
  }
};

// Exhaustive search for n <= 8.
void canon_brute(const CodedMatrix& cm, std::vector<int>& best_sigma, std::vector<uint8_t>& best) {
  const int n = cm.n;
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  best_sigma = sigma;
  best = cm.flatten(sigma);
  while (std::next_permutation(sigma.begin(), sigma.end())) {
    // compare on the fly, bail at the first position that is worse
    size_t pos = 0;
    int verdict = 0;
    for (int a = 0; a < n && verdict == 0; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        const uint8_t v = cm.at(sigma[a], sigma[b]);
        if (v != best[pos]) {
          verdict = v < best[pos] ? -1 : 1;
          break;
        }
        ++pos;
      }
    if (verdict < 0) {
      best_sigma = sigma;
      best = cm.flatten(sigma);
    }
  }
}

// Backtracking search for 9 <= n <= 12: candidates are ordered greedily and
// branches are cut with a pointwise lower bound (undecided slots filled with
// the smallest value still reachable in that row).
class CanonSearch {
 public:
  explicit CanonSearch(const CodedMatrix& cm) : cm_(cm), n_(cm.n) {}

  void run(std::vector<int>& best_sigma, std::vector<uint8_t>& best) {
    sigma_.assign(n_, -1);
    used_.assign(n_, false);
    // greedy completion of the identity as the incumbent
    std::vector<int> ident(n_);
    std::iota(ident.begin(), ident.end(), 0);
    best_ = cm_.flatten(ident);
    best_sigma_ = ident;
    dfs(0);
    best_sigma = best_sigma_;
    best = best_;
  }

 private:
  const CodedMatrix& cm_;
  int n_;
  std::vector<int> sigma_;
  std::vector<bool> used_;
  std::vector<uint8_t> best_;
  std::vector<int> best_sigma_;

  // Lex-compare the bound of the partial assignment (depth k) against best_:
  // -1 strictly better somewhere before any worse spot, +1 provably worse.
  int bound_compare(int k) const {
    size_t pos = 0;
    for (int a = 0; a < k; ++a) {
      uint8_t row_min = 255;
      for (int v = 0; v < n_; ++v)
        if (!used_[v]) row_min = std::min(row_min, cm_.at(sigma_[a], v));
      for (int b = 0; b < n_; ++b) {
        if (a == b) continue;
        const uint8_t v = b < k ? cm_.at(sigma_[a], sigma_[b]) : row_min;
        if (v != best_[pos]) return v < best_[pos] ? -1 : 1;
        ++pos;
      }
    }
    return 0;
  }

  void dfs(int k) {
    if (k == n_) {
      std::vector<uint8_t> f = cm_.flatten(sigma_);
      if (f < best_) {
        best_ = std::move(f);
        best_sigma_ = sigma_;
      }
      return;
    }
    std::vector<int> cands;
    for (int v = 0; v < n_; ++v)
      if (!used_[v]) cands.push_back(v);
    if (k > 0) {
      // try candidates in ascending order of the next row-0..k-1 cells they fix
      std::stable_sort(cands.begin(), cands.end(), [&](int a, int b) {
        return cm_.at(sigma_[0], a) < cm_.at(sigma_[0], b);
      });
    }
    for (int v : cands) {
      sigma_[k] = v;
      used_[v] = true;
      if (bound_compare(k + 1) <= 0) dfs(k + 1);
      used_[v] = false;
      sigma_[k] = -1;
    }
  }
};

}  // namespace

CanonicalForm canonical(const SolutionPoint& x) {
  if (x.n > kCanonMaxNodes)
    throw std::invalid_argument("canonical form limited to n <= " + std::to_string(kCanonMaxNodes));
  CodedMatrix cm(x);
  std::vector<int> sigma;
  std::vector<uint8_t> flat;
  if (x.n <= 8) canon_brute(cm, sigma, flat);
  else {
    CanonSearch s(cm);
    s.run(sigma, flat);
  }
  // sigma maps new label -> original node, so the witness is its inverse
  Perm witness;
  witness.img.assign(x.n, 0);
  for (int a = 0; a < x.n; ++a) witness.img[sigma[a]] = a;
  CanonicalForm cf{apply(witness, x), witness};
  return cf;
}

namespace {

// Sorted in/out row multisets; pi can only map signature-equal nodes.
std::vector<std::string> node_signatures(const CodedMatrix& cm) {
  std::vector<std::string> sig(cm.n);
  for (int i = 0; i < cm.n; ++i) {
    std::string outs, ins;
    for (int j = 0; j < cm.n; ++j) {
      if (i == j) continue;
      outs += static_cast<char>(cm.at(i, j));
      ins += static_cast<char>(cm.at(j, i));
    }
    std::sort(outs.begin(), outs.end());
    std::sort(ins.begin(), ins.end());
    sig[i] = outs + "|" + ins;
  }
  return sig;
}

void stab_dfs(const CodedMatrix& cm, const std::vector<std::string>& sig, std::vector<int>& pi,
              std::vector<bool>& used, int k, std::vector<Perm>& out) {
  const int n = cm.n;
  if (k == n) {
    Perm p;
    p.img = pi;
    out.push_back(std::move(p));
    return;
  }
  for (int v = 0; v < n; ++v) {
    if (used[v] || sig[v] != sig[k]) continue;
    bool ok = true;
    for (int j = 0; j < k && ok; ++j) {
      if (cm.at(pi[j], v) != cm.at(j, k)) ok = false;
      if (ok && cm.at(v, pi[j]) != cm.at(k, j)) ok = false;
    }
    if (!ok) continue;
    pi[k] = v;
    used[v] = true;
    stab_dfs(cm, sig, pi, used, k + 1, out);
    used[v] = false;
  }
}

std::vector<Perm> closure(std::vector<Perm> gens, int n) {
  std::set<Perm> group;
  group.insert(Perm::identity(n));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Perm> cur(group.begin(), group.end());
    for (const Perm& a : cur)
      for (const Perm& g : gens) {
        Perm c = g.after(a);
        if (group.insert(c).second) grew = true;
      }
  }
  return {group.begin(), group.end()};
}

}  // namespace

StabilizerInfo stabilizer(const SolutionPoint& x) {
  CodedMatrix cm(x);
  std::vector<int> pi(x.n, -1);
  std::vector<bool> used(x.n, false);
  StabilizerInfo info;
  stab_dfs(cm, node_signatures(cm), pi, used, 0, info.elements);
  std::sort(info.elements.begin(), info.elements.end());
  info.order = static_cast<long>(info.elements.size());
  // greedy minimal-ish generating set
  std::set<Perm> generated;
  generated.insert(Perm::identity(x.n));
  for (const Perm& e : info.elements) {
    if (generated.count(e)) continue;
    info.generators.push_back(e);
    std::vector<Perm> cl = closure(info.generators, x.n);
    generated = std::set<Perm>(cl.begin(), cl.end());
  }
  return info;
}

Int orbit_size(const SolutionPoint& x) {
  return factorial(x.n) / stabilizer(x).order;
}

OrbitRecord make_orbit_record(const SolutionPoint& x) {
  OrbitRecord rec;
  rec.n = x.n;
  if (x.n <= kCanonMaxNodes) {
    CanonicalForm cf = canonical(x);
    rec.representative = cf.representative;
    rec.canonical_key = cf.key();
  } else {
    rec.representative = x;
    rec.canonical_key = x.serialize();
  }
  StabilizerInfo st = stabilizer(x);
  rec.stabilizer_order = st.order;
  rec.stabilizer_generators = st.generators;
  rec.orbit_size = factorial(x.n) / st.order;
  rec.tight_set_count = static_cast<int>(tight_sets(x).size());
  rec.zero_count = x.zero_count();
  rec.histogram = component_histogram(x);
  return rec;
}

}  // namespace asep
