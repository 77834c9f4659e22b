#include "asep/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace asep {

namespace {

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void save_vertex(const SolutionPoint& x, const VertexFileMeta& meta, const std::string& path) {
  std::string s = "n " + std::to_string(x.n) + "\n";
  if (meta.gap) s += "gap " + rat_to_string(*meta.gap) + "\n";
  if (meta.orbit_size) s += "orbit_size " + meta.orbit_size->str() + "\n";
  if (meta.stabilizer_order) s += "stabilizer_order " + meta.stabilizer_order->str() + "\n";
  if (meta.provenance) s += "provenance " + *meta.provenance + "\n";
  for (const Rat& q : x.x) s += "x " + rat_to_string(q) + "\n";
  write_atomic(path, s);
}

LoadedVertex load_vertex(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  int n = -1;
  VertexFileMeta meta;
  std::vector<Rat> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw, rest;
    ls >> kw;
    std::getline(ls, rest);
    if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
    try {
      if (kw == "n") {
        if (n >= 0) fail(path, lineno, "duplicate n");
        n = std::stoi(rest);
        if (n < 2 || n > kMaxScanNodes) fail(path, lineno, "unsupported node count " + rest);
      } else if (kw == "gap") {
        meta.gap = parse_rat(rest);
      } else if (kw == "orbit_size") {
        meta.orbit_size = Int(rest);
      } else if (kw == "stabilizer_order") {
        meta.stabilizer_order = Int(rest);
      } else if (kw == "provenance") {
        meta.provenance = rest;
      } else if (kw == "x") {
        entries.push_back(parse_rat(rest));
      } else {
        fail(path, lineno, "unknown keyword '" + kw + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(path, lineno, e.what());
    }
  }
  if (n < 0) throw ParseError(path + ": missing n line");
  if (static_cast<int>(entries.size()) != n * (n - 1))
    throw ParseError(path + ": expected " + std::to_string(n * (n - 1)) + " x lines, found " +
                     std::to_string(entries.size()));
  SolutionPoint p;
  try {
    p = SolutionPoint::make(n, std::move(entries));
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  MemberResult mem = is_member(p);
  if (!mem) throw ParseError(path + ": point violates " + mem.violated_row);
  return {std::move(p), std::move(meta)};
}

namespace {

std::string perms_to_field(const std::vector<Perm>& perms) {
  if (perms.empty()) return "-";
  std::string s;
  for (size_t g = 0; g < perms.size(); ++g) {
    if (g) s += '|';
    for (size_t i = 0; i < perms[g].img.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(perms[g].img[i]);
    }
  }
  return s;
}

std::vector<Perm> perms_from_field(const std::string& field, int n) {
  std::vector<Perm> out;
  if (field == "-") return out;
  std::istringstream ss(field);
  std::string tok;
  while (std::getline(ss, tok, '|')) {
    Perm p;
    std::istringstream ps(tok);
    std::string v;
    while (std::getline(ps, v, ',')) p.img.push_back(std::stoi(v));
    if (p.n() != n || !p.valid()) throw ParseError("bad permutation field '" + tok + "'");
    out.push_back(std::move(p));
  }
  return out;
}

SolutionPoint point_from_key(const std::string& key) {
  if (key.rfind("n=", 0) != 0) throw ParseError("bad canonical key");
  const size_t semi = key.find(';');
  if (semi == std::string::npos) throw ParseError("bad canonical key");
  const int n = std::stoi(key.substr(2, semi - 2));
  std::vector<Rat> entries;
  std::istringstream ss(key.substr(semi + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) entries.push_back(parse_rat(tok));
  return SolutionPoint::make(n, std::move(entries));
}

}  // namespace

void save_orbit_index(const std::vector<OrbitRecord>& records, const std::string& path) {
  std::vector<const OrbitRecord*> sorted;
  for (const OrbitRecord& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const OrbitRecord* a, const OrbitRecord* b) { return a->canonical_key < b->canonical_key; });
  std::string s = "# asep orbit index v1\n";
  for (const OrbitRecord* r : sorted) {
    s += r->canonical_key;
    s += '\t' + r->orbit_size.str();
    s += '\t' + r->stabilizer_order.str();
    s += '\t' + (r->gap_value ? rat_to_string(*r->gap_value) : std::string("-"));
    s += '\t' + (r->ig_value ? rat_to_string(*r->ig_value) : std::string("-"));
    s += '\t' + std::to_string(r->tight_set_count);
    s += '\t' + std::to_string(r->zero_count);
    s += '\t';
    bool first = true;
    for (const auto& [val, cnt] : r->histogram) {
      if (!first) s += ',';
      s += rat_to_string(val) + ":" + std::to_string(cnt);
      first = false;
    }
    s += '\t' + perms_to_field(r->stabilizer_generators);
    s += '\n';
  }
  write_atomic(path, s);
}

std::vector<OrbitRecord> load_orbit_index(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::vector<OrbitRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    {
      std::istringstream ss(line);
      std::string tok;
      while (std::getline(ss, tok, '\t')) cols.push_back(tok);
    }
    if (cols.size() != 9) fail(path, lineno, "expected 9 tab-separated fields");
    try {
      OrbitRecord rec;
      rec.canonical_key = cols[0];
      rec.representative = point_from_key(cols[0]);
      rec.n = rec.representative.n;
      rec.orbit_size = Int(cols[1]);
      rec.stabilizer_order = Int(cols[2]);
      if (cols[3] != "-") rec.gap_value = parse_rat(cols[3]);
      if (cols[4] != "-") rec.ig_value = parse_rat(cols[4]);
      rec.tight_set_count = std::stoi(cols[5]);
      rec.zero_count = std::stoi(cols[6]);
      if (!cols[7].empty()) {
        std::istringstream hs(cols[7]);
        std::string tok;
        while (std::getline(hs, tok, ',')) {
          const size_t colon = tok.rfind(':');
          if (colon == std::string::npos) fail(path, lineno, "bad histogram entry");
          rec.histogram[parse_rat(tok.substr(0, colon))] = std::stoi(tok.substr(colon + 1));
        }
      }
      rec.stabilizer_generators = perms_from_field(cols[8], rec.n);
      MemberResult mem = is_member(rec.representative);
      if (!mem) fail(path, lineno, "representative violates " + mem.violated_row);
      out.push_back(std::move(rec));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(path, lineno, e.what());
    }
  }
  return out;
}

void save_certificate(const GapCertificate& cert, const std::string& path) {
  std::string s = "n " + std::to_string(cert.vertex.n) + "\n";
  s += "gap " + rat_to_string(cert.gap_value) + "\n";
  s += "ig " + rat_to_string(cert.ig_value) + "\n";
  s += "vertex " + cert.vertex.serialize() + "\n";
  for (const Rat& q : cert.costs.c) s += "c " + rat_to_string(q) + "\n";
  for (const Rat& q : cert.y_out) s += "yout " + rat_to_string(q) + "\n";
  for (const Rat& q : cert.y_in) s += "yin " + rat_to_string(q) + "\n";
  for (const auto& [mask, d] : cert.duals_by_set)
    s += "d " + std::to_string(mask) + " " + rat_to_string(d) + "\n";
  write_atomic(path, s);
}

GapCertificate load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  GapCertificate cert;
  int n = -1;
  std::vector<Rat> costs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw, rest;
    ls >> kw;
    std::getline(ls, rest);
    if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
    try {
      if (kw == "n") n = std::stoi(rest);
      else if (kw == "gap") cert.gap_value = parse_rat(rest);
      else if (kw == "ig") cert.ig_value = parse_rat(rest);
      else if (kw == "vertex") cert.vertex = point_from_key(rest);
      else if (kw == "c") costs.push_back(parse_rat(rest));
      else if (kw == "yout") cert.y_out.push_back(parse_rat(rest));
      else if (kw == "yin") cert.y_in.push_back(parse_rat(rest));
      else if (kw == "d") {
        std::istringstream ds(rest);
        std::string mask_s, val_s;
        ds >> mask_s >> val_s;
        cert.duals_by_set.emplace_back(std::stoul(mask_s), parse_rat(val_s));
      } else {
        fail(path, lineno, "unknown keyword '" + kw + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(path, lineno, e.what());
    }
  }
  if (n < 2) throw ParseError(path + ": missing n line");
  if (cert.vertex.n != n) throw ParseError(path + ": vertex size disagrees with n");
  if (static_cast<int>(costs.size()) != n * (n - 1))
    throw ParseError(path + ": expected " + std::to_string(n * (n - 1)) + " cost lines");
  if (static_cast<int>(cert.y_out.size()) != n || static_cast<int>(cert.y_in.size()) != n)
    throw ParseError(path + ": dual vector length mismatch");
  if (cert.gap_value == 0 || cert.ig_value != 1 / cert.gap_value)
    throw ParseError(path + ": gap fields are inconsistent");
  cert.costs = CostVector::make(n, std::move(costs));
  return cert;
}

AtspInstance scale_to_integers(const CostVector& c) {
  AtspInstance a;
  a.n = c.n;
  a.scale = common_denominator(c.c);
  a.claimed_optimum = a.scale;
  a.costs.assign(static_cast<size_t>(c.n) * c.n, 0);
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j) {
      if (i == j) continue;
      const Rat& q = c.at(i, j);
      a.costs[static_cast<size_t>(i) * c.n + j] = numer(q) * (a.scale / denom(q));
    }
  return a;
}

StspInstance to_stsp(const AtspInstance& a) {
  const int n = a.n;
  Int max_entry = 0, total = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Int& v = a.costs[static_cast<size_t>(i) * n + j];
      if (v > max_entry) max_entry = v;
      total += v;
    }
  StspInstance s;
  s.nodes = 2 * n;
  s.big_m = Int(n) * max_entry + 1;
  s.infinity = 2 * (Int(n) * s.big_m + total);
  s.name = a.name.empty() ? "stsp" : a.name + "_stsp";
  s.comment = a.comment;
  s.costs.assign(static_cast<size_t>(s.nodes) * s.nodes, 0);
  auto put = [&](int r, int c, const Int& v) { s.costs[static_cast<size_t>(r) * s.nodes + c] = v; };
  // built directly in shifted form: couplings 0, arcs cost+M, blocks sentinel
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        put(i, n + i, 0);
        put(n + i, i, 0);
        continue;
      }
      put(i, j, s.infinity);
      put(n + i, n + j, s.infinity);
      const Int w = a.costs[static_cast<size_t>(i) * n + j] + s.big_m;
      put(n + i, j, w);
      put(j, n + i, w);
    }
  return s;
}

namespace {

std::string matrix_section(const std::vector<Int>& costs, int dim) {
  std::string s;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (j) s += ' ';
      s += costs[static_cast<size_t>(i) * dim + j].str();
    }
    s += '\n';
  }
  return s;
}

struct TsplibFields {
  std::string name, type, comment;
  int dimension = 0;
  std::vector<Int> costs;
};

TsplibFields read_tsplib(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  TsplibFields f;
  std::string line;
  bool in_weights = false;
  while (std::getline(in, line)) {
    if (line == "EOF") break;
    if (in_weights) {
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok) f.costs.emplace_back(tok);
      continue;
    }
    const size_t colon = line.find(':');
    std::string key = line.substr(0, colon == std::string::npos ? line.size() : colon);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    std::string val = colon == std::string::npos ? "" : line.substr(colon + 1);
    while (!val.empty() && val.front() == ' ') val.erase(0, 1);
    if (key == "NAME") f.name = val;
    else if (key == "TYPE") f.type = val;
    else if (key == "COMMENT") f.comment = val;
    else if (key == "DIMENSION") f.dimension = std::stoi(val);
    else if (key == "EDGE_WEIGHT_SECTION") in_weights = true;
  }
  if (f.dimension <= 0 ||
      f.costs.size() != static_cast<size_t>(f.dimension) * static_cast<size_t>(f.dimension))
    throw ParseError(path + ": bad or missing weight matrix");
  return f;
}

}  // namespace

void write_tsplib(const AtspInstance& a, const std::string& path) {
  std::string s;
  s += "NAME: " + (a.name.empty() ? std::string("asep_atsp") : a.name) + "\n";
  s += "TYPE: ATSP\n";
  s += "COMMENT: optimum " + a.claimed_optimum.str() + "; scale " + a.scale.str();
  if (!a.comment.empty()) s += "; " + a.comment;
  s += "\n";
  s += "DIMENSION: " + std::to_string(a.n) + "\n";
  s += "EDGE_WEIGHT_TYPE: EXPLICIT\n";
  s += "EDGE_WEIGHT_FORMAT: FULL_MATRIX\n";
  s += "EDGE_WEIGHT_SECTION\n";
  s += matrix_section(a.costs, a.n);
  s += "EOF\n";
  write_atomic(path, s);
}

void write_tsplib(const StspInstance& st, const std::string& path) {
  std::string s;
  s += "NAME: " + (st.name.empty() ? std::string("asep_stsp") : st.name) + "\n";
  s += "TYPE: TSP\n";
  s += "COMMENT: big_m " + st.big_m.str() + "; infinity " + st.infinity.str();
  if (!st.comment.empty()) s += "; " + st.comment;
  s += "\n";
  s += "DIMENSION: " + std::to_string(st.nodes) + "\n";
  s += "EDGE_WEIGHT_TYPE: EXPLICIT\n";
  s += "EDGE_WEIGHT_FORMAT: FULL_MATRIX\n";
  s += "EDGE_WEIGHT_SECTION\n";
  s += matrix_section(st.costs, st.nodes);
  s += "EOF\n";
  write_atomic(path, s);
}

AtspInstance read_tsplib_atsp(const std::string& path) {
  TsplibFields f = read_tsplib(path);
  if (f.type != "ATSP") throw ParseError(path + ": expected TYPE: ATSP");
  AtspInstance a;
  a.n = f.dimension;
  a.costs = std::move(f.costs);
  a.name = f.name;
  a.comment = f.comment;
  // recover the annotations we write
  std::istringstream ss(f.comment);
  std::string kw;
  while (ss >> kw) {
    std::string val;
    if (kw == "optimum" && ss >> val) {
      if (val.back() == ';') val.pop_back();
      a.claimed_optimum = Int(val);
    } else if (kw == "scale" && ss >> val) {
      if (val.back() == ';') val.pop_back();
      a.scale = Int(val);
    }
  }
  return a;
}

StspInstance read_tsplib_stsp(const std::string& path) {
  TsplibFields f = read_tsplib(path);
  if (f.type != "TSP") throw ParseError(path + ": expected TYPE: TSP");
  StspInstance s;
  s.nodes = f.dimension;
  s.costs = std::move(f.costs);
  s.name = f.name;
  s.comment = f.comment;
  std::istringstream ss(f.comment);
  std::string kw;
  while (ss >> kw) {
    std::string val;
    if (kw == "big_m" && ss >> val) {
      if (val.back() == ';') val.pop_back();
      s.big_m = Int(val);
    } else if (kw == "infinity" && ss >> val) {
      if (val.back() == ';') val.pop_back();
      s.infinity = Int(val);
    }
  }
  return s;
}

}  // namespace asep
