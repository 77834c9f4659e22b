#pragma once

#include <optional>

#include "asep/polytope.hpp"

namespace asep {

struct Perm {
  std::vector<int> img;  // img[i] = image of node i

  static Perm identity(int n);
  int n() const { return static_cast<int>(img.size()); }
  int operator()(int i) const { return img[i]; }
  // (a.after(b))(i) = a(b(i))
  Perm after(const Perm& inner) const;
  Perm inverse() const;
  std::string cycle_string() const;  // "(0 1)(3 4)" or "id"
  bool valid() const;

  bool operator==(const Perm&) const = default;
  bool operator<(const Perm& o) const { return img < o.img; }
};

// Node relabeling acting on a point: y[pi(i)][pi(j)] = x[i][j].
SolutionPoint apply(const Perm& pi, const SolutionPoint& x);

// Exact lexicographic minimization of the flattened matrix over all n!
// relabelings is affordable up to this many nodes.
inline constexpr int kCanonMaxNodes = 12;

struct CanonicalForm {
  SolutionPoint representative;  // the lex-min relabeling
  Perm witness;                  // apply(witness, x) == representative
  std::string key() const { return representative.serialize(); }
};

CanonicalForm canonical(const SolutionPoint& x);

struct StabilizerInfo {
  Int order;
  std::vector<Perm> generators;
  std::vector<Perm> elements;
};

// All relabelings fixing x, found by backtracking with entry-consistency
// pruning; exact for any supported n.
StabilizerInfo stabilizer(const SolutionPoint& x);

Int orbit_size(const SolutionPoint& x);

struct OrbitRecord {
  int n = 0;
  std::string canonical_key;
  SolutionPoint representative;
  Int orbit_size;
  Int stabilizer_order;
  std::vector<Perm> stabilizer_generators;
  std::optional<Rat> gap_value;  // objective of the gap program
  std::optional<Rat> ig_value;   // its reciprocal
  int tight_set_count = 0;
  int zero_count = 0;
  std::map<Rat, int> histogram;
};

// Fills every field except the gap values. Above kCanonMaxNodes the point's
// own serialization stands in for the canonical key (no orbit merging is
// done at those sizes).
OrbitRecord make_orbit_record(const SolutionPoint& x);

}  // namespace asep
