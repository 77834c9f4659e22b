#pragma once

#include <optional>

#include "asep/gap.hpp"
#include "asep/symmetry.hpp"

namespace asep {

struct VertexFileMeta {
  std::optional<Rat> gap;         // gap program optimum
  std::optional<Int> orbit_size;
  std::optional<Int> stabilizer_order;
  std::optional<std::string> provenance;  // chain of break/collapse steps
};

struct LoadedVertex {
  SolutionPoint point;
  VertexFileMeta meta;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Line-oriented text format: "n <count>", optional "gap p/q",
// "orbit_size k", "stabilizer_order k", "provenance ...", then one
// "x p/q" line per arc in index order. Writes are atomic
// (temp file + rename) and byte-deterministic.
void save_vertex(const SolutionPoint& x, const VertexFileMeta& meta, const std::string& path);

// Rejects malformed files with line positions and rejects points that are
// not members of the polytope.
LoadedVertex load_vertex(const std::string& path);

// Single text manifest of orbit records keyed (and sorted) by the canonical
// serialization, which embeds the representative itself.
void save_orbit_index(const std::vector<OrbitRecord>& records, const std::string& path);
std::vector<OrbitRecord> load_orbit_index(const std::string& path);

// Gap certificates persist with the optimal costs, both dual families and
// the source vertex, so instances stay traceable to the vertex they price.
void save_certificate(const GapCertificate& cert, const std::string& path);
GapCertificate load_certificate(const std::string& path);

struct AtspInstance {
  int n = 0;
  std::vector<Int> costs;  // n*n row-major, diagonal ignored (written as 0)
  Int scale;               // source costs were multiplied by this
  Int claimed_optimum;     // = scale when built from a gap certificate
  std::string name;
  std::string comment;
};

// Multiplies by the least common denominator; the optimal tour value of the
// result equals the recorded scale.
AtspInstance scale_to_integers(const CostVector& c);

struct StspInstance {
  int nodes = 0;  // = 2n
  std::vector<Int> costs;
  Int big_m;      // node/copy coupling weight before the shift
  Int infinity;   // finite stand-in for the forbidden blocks
  std::string name;
  std::string comment;
};

// Node-doubling reduction to a symmetric instance: copy i' couples to i at
// -M, copies inherit the asymmetric costs, forbidden blocks get a finite
// sentinel, then everything shifts by +M so the minimum entry is 0. The
// tour values satisfy atsp = stsp - n*M.
StspInstance to_stsp(const AtspInstance& a);

void write_tsplib(const AtspInstance& a, const std::string& path);
void write_tsplib(const StspInstance& s, const std::string& path);
AtspInstance read_tsplib_atsp(const std::string& path);
StspInstance read_tsplib_stsp(const std::string& path);

}  // namespace asep
