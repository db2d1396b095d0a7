// Command-line surface for the correlation-invariant filtering pipeline:
// synthetic corpus generation, enrollment, thresholded identification,
// benchmark CSV emission, configuration verification, and secrecy self-tests.
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cirf/engine.hpp"
#include "cirf/hash.hpp"
#include "cirf/selfcheck.hpp"

using namespace cirf;

namespace {

struct RunConfig {
  // Field geometry; defaults are the reference configuration.
  std::uint64_t p = 8641, alpha = 40, beta = 948;
  std::uint32_t height = 32, width = 64;
  std::uint32_t k = 2;
  std::string scenario = "individual";
  int exact_di = 6, exact_dj = 12;
  int approx_di = 2, approx_dj = 4;
  double threshold = 120.0;
  // Corpus controls.
  std::uint32_t subjects = 10, fingers = 2, samples = 2;
  std::uint32_t pad_i = 6, pad_j = 12;
  std::uint32_t max_shift_i = 2, max_shift_j = 4;
  double flip_prob = 0.02, min_density = 0.15;
  std::uint64_t seed = 1;
  // Execution controls.
  unsigned threads = 1;
  bool fast_transforms = false;
  std::uint32_t timing_pairs = 1000;
  // Paths; empty entries are derived from the output directory.
  std::string out_dir;
  std::string data_path, db_path, keys_path, csv_path;
};

std::string default_out_dir() {
  const char* env = std::getenv("CIRF_OUT_DIR");
  return env && *env ? env : ".";
}

void finalize_paths(RunConfig& cfg) {
  if (cfg.out_dir.empty()) cfg.out_dir = default_out_dir();
  auto join = [&](const char* name) { return cfg.out_dir + "/" + name; };
  if (cfg.data_path.empty()) cfg.data_path = join("corpus.bin");
  if (cfg.db_path.empty()) cfg.db_path = join("records.db");
  if (cfg.keys_path.empty()) cfg.keys_path = join("keys.db");
}

GFParams field_params(const RunConfig& cfg) {
  return validate_params(cfg.p, cfg.alpha, cfg.beta, cfg.height, cfg.width);
}

Scenario scenario_of(const RunConfig& cfg) {
  return cfg.scenario == "common" ? Scenario::common : Scenario::individual;
}

CorpusSpec corpus_spec(const RunConfig& cfg) {
  CorpusSpec sp;
  sp.h = cfg.height;
  sp.w = cfg.width;
  sp.pad_i = cfg.pad_i;
  sp.pad_j = cfg.pad_j;
  sp.subjects = cfg.subjects;
  sp.fingers = cfg.fingers;
  sp.samples = cfg.samples;
  sp.seed = cfg.seed;
  sp.max_shift_i = cfg.max_shift_i;
  sp.max_shift_j = cfg.max_shift_j;
  sp.flip_prob = cfg.flip_prob;
  sp.min_density = cfg.min_density;
  return sp;
}

SystemConfig system_config(const RunConfig& cfg) {
  SystemConfig sc;
  sc.gp = field_params(cfg);
  sc.k = cfg.k;
  sc.scenario = scenario_of(cfg);
  sc.fingers = cfg.fingers;
  sc.exact_window = ShiftWindow{cfg.exact_di, cfg.exact_dj};
  sc.approx_window = ShiftWindow{cfg.approx_di, cfg.approx_dj};
  sc.pad_i = cfg.pad_i;
  sc.pad_j = cfg.pad_j;
  sc.seed = cfg.seed;
  sc.path = cfg.fast_transforms ? TransformPath::auto_radix2 : TransformPath::direct;
  return sc;
}

// Stable digest of every semantic knob; carried in each CSV row so results
// can be traced back to their configuration.
std::string config_hash(const RunConfig& cfg) {
  std::ostringstream os;
  os << "v1|" << cfg.p << '|' << cfg.alpha << '|' << cfg.beta << '|' << cfg.height << '|'
     << cfg.width << '|' << cfg.k << '|' << cfg.scenario << '|' << cfg.exact_di << '|'
     << cfg.exact_dj << '|' << cfg.approx_di << '|' << cfg.approx_dj << '|' << cfg.threshold
     << '|' << cfg.subjects << '|' << cfg.fingers << '|' << cfg.samples << '|' << cfg.pad_i
     << '|' << cfg.pad_j << '|' << cfg.max_shift_i << '|' << cfg.max_shift_j << '|'
     << cfg.flip_prob << '|' << cfg.min_density << '|' << cfg.seed << '|'
     << (cfg.fast_transforms ? 1 : 0);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
  return buf;
}

// All config flags are registered on every subcommand so invocations are
// self-contained.
void add_common_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--p", cfg.p, "Field modulus (prime)")->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "Height root of unity")->capture_default_str();
  cmd->add_option("--beta", cfg.beta, "Width root of unity")->capture_default_str();
  cmd->add_option("--height", cfg.height, "Image height h")->capture_default_str();
  cmd->add_option("--width", cfg.width, "Image width w")->capture_default_str();
  cmd->add_option("--k", cfg.k, "Factor rank of the index")->capture_default_str();
  cmd->add_option("--scenario", cfg.scenario, "Key scenario: individual or common")
      ->check(CLI::IsMember({"individual", "common"}))
      ->capture_default_str();
  cmd->add_option("--exact-di", cfg.exact_di, "Exact-score vertical shift range")
      ->capture_default_str();
  cmd->add_option("--exact-dj", cfg.exact_dj, "Exact-score horizontal shift range")
      ->capture_default_str();
  cmd->add_option("--approx-di", cfg.approx_di, "Approximate-score vertical shift range")
      ->capture_default_str();
  cmd->add_option("--approx-dj", cfg.approx_dj, "Approximate-score horizontal shift range")
      ->capture_default_str();
  cmd->add_option("--threshold", cfg.threshold, "Fused exact-distance acceptance threshold")
      ->capture_default_str();
  cmd->add_option("--subjects", cfg.subjects, "Corpus subject count")->capture_default_str();
  cmd->add_option("--fingers", cfg.fingers, "Fingers per subject")->capture_default_str();
  cmd->add_option("--samples", cfg.samples, "Samples per finger (first enrolls)")
      ->capture_default_str();
  cmd->add_option("--pad-i", cfg.pad_i, "Zeroed margin rows")->capture_default_str();
  cmd->add_option("--pad-j", cfg.pad_j, "Zeroed margin columns")->capture_default_str();
  cmd->add_option("--max-shift-i", cfg.max_shift_i, "Max genuine vertical shift")
      ->capture_default_str();
  cmd->add_option("--max-shift-j", cfg.max_shift_j, "Max genuine horizontal shift")
      ->capture_default_str();
  cmd->add_option("--flip-prob", cfg.flip_prob, "Per-pixel speckle rate of genuine samples")
      ->capture_default_str();
  cmd->add_option("--min-density", cfg.min_density, "Foreground density floor of the drawing box")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Root seed for corpus, keys, and dithers")
      ->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "Worker threads (identical non-timing output)")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();
  cmd->add_flag("--fast-transforms", cfg.fast_transforms,
                "Use radix-2 transforms when dimensions are powers of two");
  cmd->add_option("--timing-pairs", cfg.timing_pairs,
                  "Score computations per timing measurement (min 1000 used for medians)")
      ->capture_default_str();
  cmd->add_option("--out", cfg.out_dir,
                  "Output directory (default: $CIRF_OUT_DIR or the working directory)");
  cmd->add_option("--data", cfg.data_path, "Dataset file (default <out>/corpus.bin)");
  cmd->add_option("--db", cfg.db_path, "Record container file (default <out>/records.db)");
  cmd->add_option("--keys", cfg.keys_path, "Key store file (default <out>/keys.db)");
  cmd->add_option("--csv", cfg.csv_path, "Write CSV here instead of stdout");
}

// CSV sink: file when --csv is given, stdout otherwise.
struct CsvOut {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit CsvOut(const std::string& path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary | std::ios::trunc);
      if (!file) fail(Errc::io_error, "cannot open " + path);
      os = &file;
    }
  }
  std::ostream& stream() { return *os; }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ------------------------------------------------------------------ gen-data

int cmd_gen_data(RunConfig& cfg) {
  finalize_paths(cfg);
  Dataset ds = generate_corpus(corpus_spec(cfg));
  save_dataset(ds, cfg.data_path);
  std::cout << "wrote " << cfg.data_path << ": subjects=" << cfg.subjects
            << " fingers=" << cfg.fingers << " samples=" << cfg.samples
            << " images=" << ds.images.size() << " config=" << config_hash(cfg)
            << " seed=" << cfg.seed << "\n";
  return 0;
}

// -------------------------------------------------------------------- enroll

int cmd_enroll(RunConfig& cfg) {
  finalize_paths(cfg);
  Dataset ds = load_dataset(cfg.data_path);
  IdentifySystem sys(system_config(cfg));
  sys.enroll_dataset(ds);
  save_database(sys.db(), cfg.db_path);
  save_keys(sys.keystore(), cfg.keys_path);
  const Database& db = sys.db();
  std::cout << "wrote " << cfg.db_path << " and " << cfg.keys_path << ": records="
            << db.records.size() << " anchor=" << db.anchor_pos << " index_pixels_per_finger="
            << stored_index_pixels(db.records.size(), cfg.height, cfg.width, cfg.k)
            << " config=" << config_hash(cfg) << " seed=" << cfg.seed << "\n";
  return 0;
}

// ------------------------------------------------------------------ identify

struct QueryJob {
  std::uint32_t subject = 0, sample = 0;
};

struct QueryRow {
  QueryJob job;
  IdentResult res;
  std::uint32_t genuine_rank = 0;
  double elapsed_us = 0;
};

// Runs fn(i) for i in [0, n) across cfg.threads workers; outputs must be
// written by index so the thread count never changes results.
template <typename Fn>
void parallel_for(unsigned threads, std::size_t n, Fn&& fn) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  for (std::thread& th : pool) th.join();
  for (std::exception_ptr& e : errs)
    if (e) std::rethrow_exception(e);
}

int cmd_identify(RunConfig& cfg) {
  finalize_paths(cfg);
  Dataset ds = load_dataset(cfg.data_path);
  IdentifySystem sys(load_database(cfg.db_path), load_keys(cfg.keys_path),
                     ShiftWindow{cfg.exact_di, cfg.exact_dj},
                     ShiftWindow{cfg.approx_di, cfg.approx_dj},
                     cfg.fast_transforms ? TransformPath::auto_radix2 : TransformPath::direct);

  std::vector<QueryJob> jobs;
  for (std::uint32_t s = 0; s < ds.spec.subjects; ++s)
    for (std::uint32_t q = 1; q < ds.spec.samples; ++q) jobs.push_back({s, q});

  std::vector<QueryRow> rows(jobs.size());
  parallel_for(cfg.threads, jobs.size(), [&](std::size_t i) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<Matrix> imgs;
    for (std::uint32_t f = 0; f < ds.spec.fingers; ++f)
      imgs.push_back(ds.image(jobs[i].subject, f, jobs[i].sample));
    IdentResult res = sys.identify(imgs, cfg.threshold);
    auto t1 = std::chrono::steady_clock::now();
    std::uint32_t genuine_rank = 0;
    for (std::size_t r = 0; r < res.order.size(); ++r)
      if (sys.db().records[res.order[r]].enrollee_id == jobs[i].subject) {
        genuine_rank = static_cast<std::uint32_t>(r + 1);
        break;
      }
    rows[i] = {jobs[i], std::move(res), genuine_rank,
               std::chrono::duration<double, std::micro>(t1 - t0).count()};
  });

  CsvOut out(cfg.csv_path);
  std::string hash = config_hash(cfg);
  out.stream() << "config,seed,subject,sample,decision,accepted_id,fused_score,"
                  "exact_computations,genuine_rank,elapsed_us\n";
  for (const QueryRow& r : rows) {
    out.stream() << hash << ',' << cfg.seed << ',' << r.job.subject << ',' << r.job.sample << ','
                 << (r.res.accepted_id ? "accept" : "reject") << ','
                 << (r.res.accepted_id ? std::to_string(*r.res.accepted_id) : std::string("-"))
                 << ',' << r.res.accepted_score << ',' << r.res.exact_computations << ','
                 << r.genuine_rank << ',' << fmt(r.elapsed_us) << "\n";
  }
  return 0;
}

// --------------------------------------------------------------------- bench

struct TimingSummary {
  double mean_us = 0, median_us = 0;
};

TimingSummary summarize(std::vector<double> samples) {
  TimingSummary ts;
  if (samples.empty()) return ts;
  double sum = 0;
  for (double v : samples) sum += v;
  ts.mean_us = sum / samples.size();
  std::sort(samples.begin(), samples.end());
  std::size_t n = samples.size();
  ts.median_us = n % 2 ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2;
  return ts;
}

int cmd_bench(RunConfig& cfg) {
  finalize_paths(cfg);
  Dataset ds = generate_corpus(corpus_spec(cfg));
  IdentifySystem sys(system_config(cfg));
  auto te0 = std::chrono::steady_clock::now();
  sys.enroll_dataset(ds);
  auto te1 = std::chrono::steady_clock::now();
  const std::size_t n = sys.db().records.size();
  if (ds.spec.samples < 2) fail(Errc::bad_argument, "bench needs at least two samples per finger");

  // Full evaluation pass: ranking plus every exact score, per query.
  struct Eval {
    std::vector<std::uint32_t> order;
    std::vector<std::uint64_t> exact;  // by record position
    std::uint32_t genuine_pos = 0;
  };
  std::vector<Eval> evals(ds.spec.subjects);
  InttCounter::reset();
  auto ti0 = std::chrono::steady_clock::now();
  parallel_for(cfg.threads, ds.spec.subjects, [&](std::size_t s) {
    std::vector<Matrix> imgs;
    for (std::uint32_t f = 0; f < ds.spec.fingers; ++f)
      imgs.push_back(ds.image(static_cast<std::uint32_t>(s), f, 1));
    PreparedQuery pq = sys.prepare(imgs);
    Eval ev;
    for (const ApproxEntry& e : sys.rank(pq)) ev.order.push_back(e.pos);
    ev.exact.resize(n);
    for (std::size_t r = 0; r < n; ++r) ev.exact[r] = sys.exact_fused(pq, r);
    for (std::size_t r = 0; r < n; ++r)
      if (sys.db().records[r].enrollee_id == s) ev.genuine_pos = static_cast<std::uint32_t>(r);
    evals[s] = std::move(ev);
  });
  auto ti1 = std::chrono::steady_clock::now();
  std::uint64_t intt_total = InttCounter::read();

  // Score split. Impostor side pools each query's best (smallest) impostor
  // distance.
  std::vector<double> genuine, impostor;
  for (const Eval& ev : evals) {
    genuine.push_back(static_cast<double>(ev.exact[ev.genuine_pos]));
    std::uint64_t best = UINT64_MAX;
    for (std::size_t r = 0; r < n; ++r)
      if (r != ev.genuine_pos) best = std::min(best, ev.exact[r]);
    if (best != UINT64_MAX) impostor.push_back(static_cast<double>(best));
  }
  double eer = impostor.empty() ? 0.0 : equal_error_rate(genuine, impostor);
  double max_g = *std::max_element(genuine.begin(), genuine.end());
  double min_b = impostor.empty() ? max_g + 2 : *std::min_element(impostor.begin(), impostor.end());
  double thr = (max_g + min_b) / 2;  // deterministic operating point

  // Identification decisions simulated by walking each ranked order over the
  // exact scores (equivalent to identify at the same threshold).
  std::vector<IdentResult> results;
  std::vector<std::uint32_t> expected_ids, genuine_pos;
  for (std::uint32_t s = 0; s < ds.spec.subjects; ++s) {
    const Eval& ev = evals[s];
    IdentResult res;
    res.order = ev.order;
    for (std::uint32_t r : ev.order) {
      ++res.exact_computations;
      if (static_cast<double>(ev.exact[r]) < thr) {
        res.accepted_id = sys.db().records[r].enrollee_id;
        res.accepted_score = ev.exact[r];
        break;
      }
    }
    results.push_back(std::move(res));
    expected_ids.push_back(s);
    genuine_pos.push_back(evals[s].genuine_pos);
  }
  double accept = correct_accept_rate(results, expected_ids);
  double avg_exact = mean_penetration(results, expected_ids);

  const std::uint32_t curve_samples[] = {1, 2, 5, 10, 25, 50, 100};
  auto hit_at = [&](std::uint32_t np) { return hit_rate(results, genuine_pos, np); };

  // Per-score timing on a fixed fixture pair, warmup excluded, medians over
  // at least 1000 computations.
  CirfContext timing_ctx(sys.ctx().params(),
                         cfg.fast_transforms ? TransformPath::auto_radix2 : TransformPath::direct);
  ShiftWindow timing_win{cfg.exact_di, cfg.exact_dj};
  std::uint32_t pairs = std::max<std::uint32_t>(cfg.timing_pairs, 1000);
  (void)measure_score_timing(timing_ctx, cfg.k, timing_win, 16, cfg.seed);  // warmup, discarded
  const std::uint32_t chunks = 20;
  std::uint32_t batch = (pairs + chunks - 1) / chunks;
  std::vector<double> exact_t, approx_t;
  for (std::uint32_t c = 0; c < chunks; ++c) {
    ScoreTiming st = measure_score_timing(timing_ctx, cfg.k, timing_win, batch, cfg.seed + c);
    exact_t.push_back(st.exact_us);
    approx_t.push_back(st.approx_us);
  }
  TimingSummary ex = summarize(exact_t), ap = summarize(approx_t);
  double enroll_ms = std::chrono::duration<double, std::milli>(te1 - te0).count();
  double eval_ms = std::chrono::duration<double, std::milli>(ti1 - ti0).count();

  CsvOut out(cfg.csv_path);
  out.stream() << "config,seed,subjects,k,scenario,eer,threshold,accept_rate,avg_exact";
  for (std::uint32_t np : curve_samples)
    if (np <= n) out.stream() << ",hit@" << np;
  out.stream() << ",hit@all,intt_identify,exact_mean_us,exact_median_us,approx_mean_us,"
                  "approx_median_us,ratio,enroll_ms,eval_ms\n";
  out.stream() << config_hash(cfg) << ',' << cfg.seed << ',' << ds.spec.subjects << ',' << cfg.k
               << ',' << cfg.scenario << ',' << fmt(eer) << ',' << fmt(thr) << ',' << fmt(accept)
               << ',' << fmt(avg_exact);
  for (std::uint32_t np : curve_samples)
    if (np <= n) out.stream() << ',' << fmt(hit_at(np));
  out.stream() << ',' << fmt(hit_at(static_cast<std::uint32_t>(n))) << ',' << intt_total << ','
               << fmt(ex.mean_us) << ',' << fmt(ex.median_us) << ',' << fmt(ap.mean_us) << ','
               << fmt(ap.median_us) << ',' << fmt(ap.mean_us > 0 ? ex.mean_us / ap.mean_us : 0)
               << ',' << fmt(enroll_ms) << ',' << fmt(eval_ms) << "\n";
  return 0;
}

// -------------------------------------------------------------------- verify

int cmd_verify(RunConfig& cfg, bool check_db, bool check_keys, bool check_data) {
  finalize_paths(cfg);
  int failures = 0;
  auto report = [&](bool pass, const std::string& line) {
    std::cout << (pass ? "PASS  " : "FAIL  ") << line << "\n";
    failures += pass ? 0 : 1;
  };

  GFParams gp = field_params(cfg);
  for (const CheckResult& c : run_transform_checks(gp, cfg.seed, cfg.k))
    report(c.pass, c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));

  std::optional<Database> db;
  std::optional<KeyStore> ks;
  auto load = [&](const char* what, const std::string& path, auto&& loader) {
    try {
      loader(path);
      report(true, std::string(what) + " " + path);
    } catch (const Error& e) {
      report(false, std::string(what) + " " + path + ": " + e.what());
    }
  };
  if (check_data)
    load("dataset container", cfg.data_path, [](const std::string& p) { (void)load_dataset(p); });
  if (check_db)
    load("record container", cfg.db_path,
         [&](const std::string& p) { db = load_database(p); });
  if (check_keys)
    load("key store", cfg.keys_path, [&](const std::string& p) { ks = load_keys(p); });
  if (db && ks) {
    try {
      IdentifySystem sys(*db, *ks, ShiftWindow{cfg.exact_di, cfg.exact_dj},
                         ShiftWindow{cfg.approx_di, cfg.approx_dj});
      report(true, "key store covers the record container (" +
                       std::to_string(sys.db().records.size()) + " records)");
    } catch (const Error& e) {
      report(false, std::string("key store compatibility: ") + e.what());
    }
  }
  std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}

// -------------------------------------------------------------- secrecy-test

int cmd_secrecy(RunConfig& cfg, std::uint32_t trials, std::uint64_t draws, std::uint32_t pairs) {
  GFParams gp = field_params(cfg);
  CirfContext ctx(gp, cfg.fast_transforms ? TransformPath::auto_radix2 : TransformPath::direct);
  int failures = 0;
  auto report = [&](bool pass, const std::string& line) {
    std::cout << (pass ? "PASS  " : "FAIL  ") << line << "\n";
    failures += pass ? 0 : 1;
  };

  bool bij = filter_reconstruction_roundtrip(ctx, cfg.seed, trials);
  report(bij, "parameter-uniqueness reconstruction: " + std::to_string(trials) +
                  " zero-free round trips");

  for (const UniformityRow& row : filter_output_uniformity(ctx, cfg.seed, draws))
    report(row.pass, "uniformity " + row.label + ": chi2=" + fmt(row.chi2) + " critical=" +
                         fmt(row.critical) + " bins=" + std::to_string(row.bins) + " draws=" +
                         std::to_string(row.draws));

  double rho = unlinkability_correlation(ctx, cfg.seed, pairs);
  double bound = unlinkability_threshold(static_cast<std::uint64_t>(pairs) * gp.h * gp.w);
  report(rho < bound, "unlinkability pooled |rho|=" + fmt(rho) + " bound=" + fmt(bound) +
                          " pairs=" + std::to_string(pairs));

  std::cout << "scenario,n,feature_unknowns,feature_equations,index_unknowns,index_equations,"
               "underdetermined\n";
  for (Scenario sc : {Scenario::individual, Scenario::common})
    for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{10}, std::uint64_t{1000}}) {
      LeakageAudit a = equation_audit(sc, n, cfg.height, cfg.width, cfg.k);
      bool under = a.underdetermined();
      std::cout << scenario_name(sc) << ',' << n << ',' << a.feature_unknowns << ','
                << a.feature_equations << ',' << a.index_unknowns << ',' << a.index_equations
                << ',' << (under ? 1 : 0) << "\n";
      failures += under ? 0 : 1;
    }

  std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation-invariant random filtering: protected biometric identification"};
  app.require_subcommand(1);

  RunConfig cfg;

  CLI::App* gen = app.add_subcommand("gen-data", "Generate a synthetic corpus file");
  add_common_options(gen, cfg);

  CLI::App* enroll = app.add_subcommand("enroll", "Enroll a corpus into protected containers");
  add_common_options(enroll, cfg);

  CLI::App* identify =
      app.add_subcommand("identify", "Identify every probe sample against the database (CSV)");
  add_common_options(identify, cfg);

  CLI::App* bench =
      app.add_subcommand("bench", "End-to-end benchmark and metric emission (CSV)");
  add_common_options(bench, cfg);

  CLI::App* verify = app.add_subcommand("verify", "Run the configuration self-checks");
  add_common_options(verify, cfg);
  bool check_db = false, check_keys = false, check_data = false;
  verify->add_flag("--check-db", check_db, "Also verify the record container checksums");
  verify->add_flag("--check-keys", check_keys, "Also verify the key store checksums");
  verify->add_flag("--check-data", check_data, "Also verify the dataset container checksum");

  CLI::App* secrecy = app.add_subcommand("secrecy-test", "Run the secrecy self-tests");
  add_common_options(secrecy, cfg);
  std::uint32_t trials = 1000, pairs = 200;
  std::uint64_t draws = 100000;
  secrecy->add_option("--trials", trials, "Reconstruction round trips")->capture_default_str();
  secrecy->add_option("--draws", draws, "Uniformity draws per output class")
      ->capture_default_str();
  secrecy->add_option("--pairs", pairs, "Unlinkability transform pairs")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(cfg);
    if (enroll->parsed()) return cmd_enroll(cfg);
    if (identify->parsed()) return cmd_identify(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
    if (verify->parsed()) return cmd_verify(cfg, check_db, check_keys, check_data);
    if (secrecy->parsed()) return cmd_secrecy(cfg, trials, draws, pairs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
