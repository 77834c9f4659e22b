#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>

#include "asep/io.hpp"
#include "asep/loops.hpp"
#include "asep/pivot.hpp"

using namespace asep;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitBudget = 3;

std::mutex event_mu;

void emit_event(const std::string& kind, const std::string& detail) {
  std::lock_guard<std::mutex> lk(event_mu);
  std::cerr << "event=" << kind << " " << detail << "\n";
}

std::string default_out() {
  if (const char* env = std::getenv("ASEP_OUT_DIR")) return env;
  return "out";
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

double decimal(const Rat& q) { return rat_to_double(q); }

std::string cycles(const std::vector<Perm>& gens) {
  if (gens.empty()) return "id";
  std::string s;
  for (size_t i = 0; i < gens.size(); ++i) {
    if (i) s += ", ";
    s += gens[i].cycle_string();
  }
  return s;
}

ordered_json record_row(const OrbitRecord& rec, const std::map<std::string, long>& ncounts) {
  ordered_json row;
  row["orbit_size"] = rec.orbit_size.str();
  row["stabilizer_order"] = rec.stabilizer_order.str();
  row["stabilizer"] = cycles(rec.stabilizer_generators);
  row["gap"] = rec.gap_value ? rat_to_string(*rec.gap_value) : "-";
  row["ig"] = rec.ig_value ? rat_to_string(*rec.ig_value) : "-";
  row["tight_sets"] = rec.tight_set_count;
  row["zeros"] = rec.zero_count;
  std::string hist;
  for (const auto& [val, cnt] : rec.histogram) {
    if (!hist.empty()) hist += " ";
    hist += rat_to_string(val) + "x" + std::to_string(cnt);
  }
  row["components"] = hist;
  auto it = ncounts.find(rec.canonical_key);
  if (it != ncounts.end()) row["neighbors"] = it->second;
  row["key"] = rec.canonical_key;
  return row;
}

void write_manifest(const fs::path& out, ordered_json manifest, double wall_seconds) {
  manifest["wall_seconds"] = wall_seconds;
  std::ofstream f(out / "manifest.json", std::ios::trunc);
  f << manifest.dump(2) << "\n";
}

// provenance stub for the single-shot commands
struct ManifestScope {
  fs::path out;
  ordered_json manifest;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  ManifestScope(const fs::path& out_dir, const std::string& command, ordered_json options)
      : out(out_dir) {
    manifest["command"] = command;
    manifest["options"] = std::move(options);
    manifest["output_dir"] = out.string();
    manifest["outputs"] = ordered_json::array();
  }
  void produced(const fs::path& path) { manifest["outputs"].push_back(path.string()); }
  ~ManifestScope() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out, std::move(manifest), wall);
  }
};

int run_search(const std::string& command, const std::vector<SolutionPoint>& starts,
               const std::vector<std::string>& start_names, const ExploreConfig& cfg,
               const std::string& out_dir, ordered_json options) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::path out = prepare_out(out_dir);
  ExploreResult res = explore(starts, cfg, [](const ProgressEvent& ev) {
    emit_event(ev.kind, ev.detail);
  });
  save_orbit_index(res.records, (out / "index.tsv").string());

  ordered_json manifest;
  manifest["command"] = command;
  manifest["options"] = std::move(options);
  manifest["seed"] = cfg.seed;
  manifest["starts"] = start_names;
  manifest["output_dir"] = out.string();
  Int vertices = 0;
  for (const OrbitRecord& rec : res.records) vertices += rec.orbit_size;
  ordered_json summary;
  summary["orbits"] = res.records.size();
  summary["vertices"] = vertices.str();
  summary["iterations"] = res.iterations;
  summary["pivots"] = res.pivots;
  ordered_json best;
  for (const BoundEntry& e : lower_bound_report(res.records))
    best[std::to_string(e.n)] = rat_to_string(e.ig);
  summary["best_ig"] = best;
  manifest["summary"] = summary;
  ordered_json rows = ordered_json::array();
  for (const OrbitRecord& rec : res.records) rows.push_back(record_row(rec, res.neighbor_counts));
  manifest["orbits"] = rows;
  manifest["budget_exhausted"] = res.budget_exhausted;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out, std::move(manifest), wall);

  std::cout << "orbits " << res.records.size() << ", vertices " << vertices.str() << "\n";
  for (const BoundEntry& e : lower_bound_report(res.records))
    std::cout << "best ig at n=" << e.n << ": " << rat_to_string(e.ig) << " ("
              << decimal(e.ig) << ")\n";
  std::cout << "index written to " << (out / "index.tsv").string() << "\n";
  return res.budget_exhausted ? kExitBudget : 0;
}

std::vector<std::string> collect_vertex_files(const std::string& path) {
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.path().extension() == ".vtx") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  return files;
}

std::string index_file(const std::string& path) {
  if (fs::is_directory(path)) return (fs::path(path) / "index.tsv").string();
  return path;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact search for worst-case vertices of the subtour elimination relaxation"};
  app.require_subcommand(1);

  std::string out_dir = default_out();
  app.add_option("--out", out_dir, "output directory (or set ASEP_OUT_DIR)")->capture_default_str();

  auto* cmd_enum = app.add_subcommand("enumerate", "exhaustive orbit enumeration from a tour");
  int enum_n = 4;
  int enum_jobs = 1;
  cmd_enum->add_option("--n", enum_n, "node count (4 or 5)")->required();
  cmd_enum->add_option("--jobs", enum_jobs, "gap-solve workers");

  auto* cmd_explore = app.add_subcommand("explore", "budgeted worklist search");
  int ex_n = 0;
  std::string ex_starts;
  long ex_iters = -1, ex_pivots_total = -1, ex_pivots_iter = -1;
  double ex_t_total = -1, ex_t_iter = -1;
  uint64_t ex_seed = 0;
  int ex_jobs = 1;
  bool ex_no_gaps = false;
  cmd_explore->add_option("--n", ex_n, "target node count")->required();
  cmd_explore->add_option("--starts", ex_starts, "vertex file or directory of .vtx starts")->required();
  cmd_explore->add_option("--max-iters", ex_iters, "max vertices pivoted on");
  cmd_explore->add_option("--t-total", ex_t_total, "total time budget, seconds");
  cmd_explore->add_option("--t-iter", ex_t_iter, "per-vertex time budget, seconds");
  cmd_explore->add_option("--pivots-total", ex_pivots_total, "total pivot budget");
  cmd_explore->add_option("--pivots-per-vertex", ex_pivots_iter, "per-vertex pivot budget");
  cmd_explore->add_option("--seed", ex_seed, "sampling seed for n > 8");
  cmd_explore->add_option("--jobs", ex_jobs, "gap-solve workers");
  cmd_explore->add_flag("--no-gaps", ex_no_gaps, "skip gap solves");

  auto* cmd_gap = app.add_subcommand("gap", "solve the gap program for one vertex");
  std::string gap_vertex;
  cmd_gap->add_option("--vertex", gap_vertex, "vertex file")->required();

  auto* cmd_break = app.add_subcommand("break", "split loops into a new node");
  std::string break_vertex, break_loop_arg;
  cmd_break->add_option("--vertex", break_vertex, "vertex file")->required();
  cmd_break->add_option("--loop", break_loop_arg, "v1,v2 (default: all loops)");

  auto* cmd_collapse = app.add_subcommand("collapse", "merge a tight set into one node");
  std::string col_vertex;
  uint32_t col_mask = 0;
  int col_target = 0;
  cmd_collapse->add_option("--vertex", col_vertex, "vertex file")->required();
  cmd_collapse->add_option("--set", col_mask, "tight set as a bitmask")->required();
  cmd_collapse->add_option("--target", col_target, "output label of the merged node");

  auto* cmd_canon = app.add_subcommand("canon", "canonical form and symmetry data");
  std::string canon_vertex;
  cmd_canon->add_option("--vertex", canon_vertex, "vertex file")->required();

  auto* cmd_export = app.add_subcommand("export", "emit a TSPLIB instance from a certificate");
  std::string export_cert, export_format = "atsp";
  cmd_export->add_option("--certificate", export_cert, "certificate file")->required();
  cmd_export->add_option("--format", export_format, "atsp or stsp")
      ->check(CLI::IsMember({"atsp", "stsp"}));

  auto* cmd_report = app.add_subcommand("report", "best bounds per node count");
  std::string report_index;
  cmd_report->add_option("--index", report_index, "orbit index file or directory")->required();

  auto* cmd_verify = app.add_subcommand("verify", "re-run the invariant suite over an archive");
  std::string verify_index;
  bool verify_full = false;
  cmd_verify->add_option("--index", verify_index, "orbit index file or directory")->required();
  cmd_verify->add_flag("--full", verify_full, "also re-solve gaps (n <= 8)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_enum) {
      if (enum_n < 4 || enum_n > 5) {
        std::cerr << "enumerate supports n = 4 or 5\n";
        return kExitBadInput;
      }
      ExploreConfig cfg;
      cfg.n = enum_n;
      cfg.jobs = enum_jobs;
      ordered_json options{{"n", enum_n}, {"jobs", enum_jobs}};
      return run_search("enumerate", {standard_cycle(enum_n)}, {"standard_cycle"}, cfg, out_dir,
                        options);
    }

    if (*cmd_explore) {
      std::vector<std::string> files = collect_vertex_files(ex_starts);
      if (files.empty()) {
        std::cerr << "no .vtx starts under " << ex_starts << "\n";
        return kExitBadInput;
      }
      std::vector<SolutionPoint> starts;
      for (const std::string& f : files) starts.push_back(load_vertex(f).point);
      ExploreConfig cfg;
      cfg.n = ex_n;
      cfg.max_iterations = ex_iters;
      cfg.t_total = ex_t_total;
      cfg.t_iter = ex_t_iter;
      cfg.pivots_total = ex_pivots_total;
      cfg.pivots_per_vertex = ex_pivots_iter;
      cfg.seed = ex_seed;
      cfg.jobs = ex_jobs;
      cfg.solve_gaps = !ex_no_gaps;
      ordered_json options{{"n", ex_n},
                           {"max_iters", ex_iters},
                           {"t_total", ex_t_total},
                           {"t_iter", ex_t_iter},
                           {"pivots_total", ex_pivots_total},
                           {"pivots_per_vertex", ex_pivots_iter},
                           {"jobs", ex_jobs},
                           {"gaps", !ex_no_gaps}};
      return run_search("explore", starts, files, cfg, out_dir, options);
    }

    if (*cmd_gap) {
      LoadedVertex lv = load_vertex(gap_vertex);
      GapCertificate cert = solve_gap(lv.point);
      std::cout << rat_to_string(cert.ig_value) << " (" << decimal(cert.ig_value) << ")\n";
      std::cout << "gap " << rat_to_string(cert.gap_value) << "\n";
      fs::path out = prepare_out(out_dir);
      ManifestScope scope(out, "gap", {{"vertex", gap_vertex}});
      fs::path cert_path = out / (fs::path(gap_vertex).stem().string() + ".cert");
      save_certificate(cert, cert_path.string());
      scope.produced(cert_path);
      std::cout << "certificate written to " << cert_path.string() << "\n";
      return 0;
    }

    if (*cmd_break) {
      LoadedVertex lv = load_vertex(break_vertex);
      if (!is_vertex(lv.point)) {
        std::cerr << "input is not a vertex\n";
        return kExitBadInput;
      }
      std::vector<LambdaLoop> loops = detect_loops(lv.point);
      if (!break_loop_arg.empty()) {
        const size_t comma = break_loop_arg.find(',');
        if (comma == std::string::npos) {
          std::cerr << "--loop expects v1,v2\n";
          return kExitBadInput;
        }
        const int v1 = std::stoi(break_loop_arg.substr(0, comma));
        const int v2 = std::stoi(break_loop_arg.substr(comma + 1));
        std::erase_if(loops, [&](const LambdaLoop& l) {
          return !(l.v1 == std::min(v1, v2) && l.v2 == std::max(v1, v2));
        });
        if (loops.empty()) {
          std::cerr << "no loop on that node pair\n";
          return kExitBadInput;
        }
      }
      fs::path out = prepare_out(out_dir);
      ManifestScope scope(out, "break", {{"vertex", break_vertex}, {"loop", break_loop_arg}});
      const std::string stem = fs::path(break_vertex).stem().string();
      for (const LambdaLoop& loop : loops) {
        SolutionPoint child = break_loop(lv.point, loop, lv.point.n);
        VertexFileMeta meta;
        meta.provenance = "break(" + std::to_string(loop.v1) + "," + std::to_string(loop.v2) +
                          ") of " + stem;
        fs::path path = out / (stem + "_break_" + std::to_string(loop.v1) + "_" +
                               std::to_string(loop.v2) + ".vtx");
        save_vertex(child, meta, path.string());
        scope.produced(path);
        std::cout << "loop (" << loop.v1 << "," << loop.v2 << ") lambda "
                  << rat_to_string(loop.lambda) << " -> " << path.string() << "\n";
      }
      return 0;
    }

    if (*cmd_collapse) {
      LoadedVertex lv = load_vertex(col_vertex);
      CollapseSpec spec{{lv.point.n, col_mask}, col_target};
      CollapseResult r = collapse(lv.point, spec);
      fs::path out = prepare_out(out_dir);
      ManifestScope scope(out, "collapse",
                          {{"vertex", col_vertex}, {"set", col_mask}, {"target", col_target}});
      const std::string stem = fs::path(col_vertex).stem().string();
      fs::path path = out / (stem + "_collapse_" + std::to_string(col_mask) + ".vtx");
      VertexFileMeta meta;
      meta.provenance = "collapse(" + NodeSet{lv.point.n, col_mask}.to_string() + ") of " + stem;
      save_vertex(r.point, meta, path.string());
      scope.produced(path);
      scope.manifest["vertex_flag"] = r.vertex;
      std::cout << "vertex " << (r.vertex ? "yes" : "no") << "\n";
      std::cout << "written to " << path.string() << "\n";
      return 0;
    }

    if (*cmd_canon) {
      LoadedVertex lv = load_vertex(canon_vertex);
      OrbitRecord rec = make_orbit_record(lv.point);
      std::cout << "canonical " << rec.canonical_key << "\n";
      std::cout << "orbit_size " << rec.orbit_size.str() << "\n";
      std::cout << "stabilizer_order " << rec.stabilizer_order.str() << "\n";
      std::cout << "generators " << cycles(rec.stabilizer_generators) << "\n";
      return 0;
    }

    if (*cmd_export) {
      GapCertificate cert = load_certificate(export_cert);
      AtspInstance a = scale_to_integers(cert.costs);
      const std::string stem = fs::path(export_cert).stem().string();
      a.name = stem;
      std::string provenance = cert.vertex.n <= kCanonMaxNodes
                                   ? canonical(cert.vertex).key()
                                   : cert.vertex.serialize();
      a.comment = "ig " + rat_to_string(cert.ig_value) + "; vertex " + provenance;
      fs::path out = prepare_out(out_dir);
      ManifestScope scope(out, "export",
                          {{"certificate", export_cert}, {"format", export_format}});
      if (export_format == "atsp") {
        fs::path path = out / (stem + ".atsp");
        write_tsplib(a, path.string());
        scope.produced(path);
        std::cout << "written to " << path.string() << "\n";
      } else {
        StspInstance s = to_stsp(a);
        fs::path path = out / (stem + ".tsp");
        write_tsplib(s, path.string());
        scope.produced(path);
        std::cout << "written to " << path.string() << "\n";
      }
      return 0;
    }

    if (*cmd_report) {
      std::vector<OrbitRecord> records = load_orbit_index(index_file(report_index));
      std::vector<BoundEntry> report = lower_bound_report(records);
      std::cout << "n\tig\tdecimal\twitness\n";
      for (const BoundEntry& e : report)
        std::cout << e.n << "\t" << rat_to_string(e.ig) << "\t" << decimal(e.ig) << "\t"
                  << e.witness_key.substr(0, 32) << "...\n";
      return 0;
    }

    if (*cmd_verify) {
      std::vector<OrbitRecord> records = load_orbit_index(index_file(verify_index));
      int failures = 0;
      auto complain = [&](const OrbitRecord& rec, const std::string& what) {
        ++failures;
        std::cout << "FAIL " << what << " for " << rec.canonical_key.substr(0, 32) << "...\n";
      };
      for (const OrbitRecord& rec : records) {
        if (!is_member(rec.representative).member) complain(rec, "membership");
        else if (!is_vertex(rec.representative)) complain(rec, "vertexhood");
        if (rec.n <= kCanonMaxNodes &&
            canonical(rec.representative).key() != rec.canonical_key)
          complain(rec, "canonical idempotence");
        StabilizerInfo st = stabilizer(rec.representative);
        if (st.order != rec.stabilizer_order) complain(rec, "stabilizer order");
        if (rec.orbit_size * rec.stabilizer_order != factorial(rec.n))
          complain(rec, "orbit-stabilizer product");
        if (component_histogram(rec.representative) != rec.histogram) complain(rec, "histogram");
        if (static_cast<int>(tight_sets(rec.representative).size()) != rec.tight_set_count)
          complain(rec, "tight set count");
        if (rec.representative.zero_count() != rec.zero_count) complain(rec, "zero count");
        if (verify_full && rec.n <= 8 && rec.gap_value) {
          GapCertificate cert = solve_gap(rec.representative);
          if (cert.gap_value != *rec.gap_value) complain(rec, "gap value");
        }
      }
      std::cout << (failures == 0 ? "all records verified" : "verification failed") << "\n";
      return failures == 0 ? 0 : kExitBadInput;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const GapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return 0;
}
