#pragma once

#include <atomic>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "oracle.hpp"
#include "random.hpp"

namespace eof2q::cli {

// Exit codes: 0 success, 1 usage/IO error, 2 validation error,
// 3 formula violation (verify only).

namespace detail {

template <class F>
inline void parallel_for(int nitems, int threads, F f) {
  if (threads <= 1 || nitems <= 1) {
    for (int i = 0; i < nitems; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= nitems) break;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min(threads, nitems);
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

enum class batch_mode { eof_only, decompose, verify };

struct batch_options {
  std::string input;
  bool normalize = false;
  int threads = 1;
  batch_mode mode = batch_mode::eof_only;
  int samples = 100;
  std::uint64_t seed = 1;
};

// Shared driver for eof/concurrence/decompose/verify: per-matrix work is pure
// and independent, so the batch is mapped in parallel and emitted in input
// order. Records go to `out`, diagnostics to `err`.
inline int run_batch(const batch_options& opt, std::ostream& out, std::ostream& err) {
  std::ifstream in(opt.input);
  if (!in) {
    err << "error: cannot open '" << opt.input << "'\n";
    return 1;
  }
  std::vector<io::file_entry> entries;
  try {
    entries = io::read_matrix_file(in);
  } catch (const io::parse_error& ex) {
    err << opt.input << ": " << ex.what() << "\n";
    return 2;
  }

  const int n = static_cast<int>(entries.size());
  std::vector<std::string> records(n);
  std::vector<std::vector<std::string>> diags(n);
  std::vector<char> invalid(n, 0), violated(n, 0);

  parallel_for(n, opt.threads, [&](int i) {
    auto& e = entries[i];
    if (!e.matrix) {
      diags[i] = e.issues;
      invalid[i] = 1;
      return;
    }
    std::vector<std::string> issues;
    const auto rho = io::validate_entry(*e.matrix, opt.normalize, issues);
    if (!rho) {
      diags[i] = issues;
      invalid[i] = 1;
      return;
    }
    try {
      switch (opt.mode) {
        case batch_mode::eof_only:
          records[i] = io::result_record(e.label, *rho).dump();
          break;
        case batch_mode::decompose:
          records[i] = io::decomposition_record(e.label, *rho).dump();
          break;
        case batch_mode::verify:
          try {
            const auto rep = verify_formula(*rho, opt.samples, mix_seed(opt.seed, i));
            records[i] = io::verification_record(e.label, rep).dump();
          } catch (const formula_violation& ex) {
            records[i] = io::verification_record(e.label, ex.report).dump();
            diags[i].push_back(std::string("formula violation: ") + ex.what());
            violated[i] = 1;
          }
          break;
      }
    } catch (const error& ex) {
      diags[i].push_back(ex.what());
      invalid[i] = 1;
    }
  });

  bool any_invalid = false, any_violation = false;
  for (int i = 0; i < n; ++i) {
    if (!records[i].empty()) out << records[i] << "\n";
    for (const auto& d : diags[i]) err << entries[i].label << ": " << d << "\n";
    any_invalid = any_invalid || invalid[i];
    any_violation = any_violation || violated[i];
  }
  if (any_violation) return 3;
  return any_invalid ? 2 : 0;
}

inline int run_random(const std::string& method, int rank, bool rank_given, int count,
                      std::uint64_t seed, const std::string& output, std::ostream& err) {
  random_spec spec;
  spec.count = count;
  spec.seed = seed;
  std::string prefix;
  if (method == "ginibre") {
    spec.method = random_method::ginibre;
    spec.rank = rank;
    prefix = "g" + std::to_string(rank) + "-";
  } else if (method == "mixture_of_pures") {
    spec.method = random_method::mixture_of_pures;
    prefix = "mix-";
  } else if (method == "haar_pure") {
    spec.method = random_method::haar_pure;
    prefix = "pure-";
  } else {
    err << "error: unknown --method '" << method << "'\n";
    return 1;
  }
  if (rank_given && method != "ginibre") {
    err << "error: --rank applies only to the ginibre method\n";
    return 1;
  }

  std::vector<std::pair<std::string, cmat>> entries;
  entries.reserve(count);
  for (int k = 0; k < count; ++k)
    entries.emplace_back(prefix + std::to_string(k), random_density_matrix(spec, k).matrix());

  std::ofstream out(output);
  if (!out) {
    err << "error: cannot write '" << output << "'\n";
    return 1;
  }
  io::write_matrix_file(out, entries);
  return 0;
}

inline int run_bench(int count, std::uint64_t seed, bool eof_only, std::ostream& out) {
  using clock = std::chrono::steady_clock;
  random_spec spec;
  spec.method = random_method::ginibre;
  spec.rank = 4;
  spec.count = count;
  spec.seed = seed;
  const auto mats = random_density_matrices(spec);  // excluded from timing

  io::json rep;
  rep["count"] = count;
  {
    double checksum = 0.0;
    const auto t0 = clock::now();
    for (const auto& rho : mats) checksum += eof(rho);
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    rep["eof"] = {{"seconds", secs},
                  {"mean_us", 1e6 * secs / count},
                  {"per_second", count / secs},
                  {"checksum", checksum}};
  }
  if (!eof_only) {
    double checksum = 0.0;
    const auto t0 = clock::now();
    for (const auto& rho : mats) checksum += norm_sq(optimal_decomposition(rho).members[0]);
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    rep["decompose"] = {{"seconds", secs},
                        {"mean_us", 1e6 * secs / count},
                        {"per_second", count / secs},
                        {"checksum", checksum}};
  }
  out << rep.dump() << "\n";
  return 0;
}

}  // namespace detail

/// Runs the command-line interface on `args` (program name excluded), writing
/// records to `out` and diagnostics to `err`. Returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement of formation for two-qubit density matrices"};
  app.name("eof2q");

  detail::batch_options batch;
  std::string method = "ginibre";
  int rank = 4, count = 1000;
  std::uint64_t gen_seed = 0;
  std::string output;
  bool eof_only = false;

  const auto add_batch_flags = [&](CLI::App* sub, bool with_sampling) {
    sub->add_option("input", batch.input, "matrix file (JSON)")->required();
    sub->add_flag("--normalize", batch.normalize,
                  "rescale trace to 1 when within [0.9, 1.1]");
    sub->add_option("--threads", batch.threads, "parallel fan-out over matrices")
        ->check(CLI::PositiveNumber);
    if (with_sampling) {
      sub->add_option("--samples", batch.samples, "random decompositions per matrix")
          ->check(CLI::PositiveNumber);
      sub->add_option("--seed", batch.seed, "seed for decomposition sampling");
    }
  };

  auto* c_eof = app.add_subcommand("eof", "entanglement of formation per matrix");
  add_batch_flags(c_eof, false);
  auto* c_conc = app.add_subcommand("concurrence", "concurrence per matrix");
  add_batch_flags(c_conc, false);
  auto* c_dec = app.add_subcommand("decompose", "optimal pure-state decompositions");
  add_batch_flags(c_dec, false);
  auto* c_ver = app.add_subcommand("verify", "brute-force verification reports");
  add_batch_flags(c_ver, true);

  auto* c_rand = app.add_subcommand("random", "generate a random matrix file");
  c_rand->add_option("--method", method, "ginibre | mixture_of_pures | haar_pure");
  auto* rank_opt = c_rand->add_option("--rank", rank, "rank for the ginibre method")
                       ->check(CLI::Range(1, 4));
  c_rand->add_option("--count", count, "number of matrices")->check(CLI::PositiveNumber);
  c_rand->add_option("--seed", gen_seed, "generator seed");
  c_rand->add_option("output", output, "output path")->required();

  auto* c_bench = app.add_subcommand("bench", "throughput benchmark");
  c_bench->add_option("--count", count, "number of matrices")->check(CLI::PositiveNumber);
  c_bench->add_option("--seed", gen_seed, "generator seed");
  c_bench->add_flag("--eof-only", eof_only, "skip the decompose timing");

  app.require_subcommand(1);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand(c_eof) || app.got_subcommand(c_conc)) {
      batch.mode = detail::batch_mode::eof_only;
      return detail::run_batch(batch, out, err);
    }
    if (app.got_subcommand(c_dec)) {
      batch.mode = detail::batch_mode::decompose;
      return detail::run_batch(batch, out, err);
    }
    if (app.got_subcommand(c_ver)) {
      batch.mode = detail::batch_mode::verify;
      return detail::run_batch(batch, out, err);
    }
    if (app.got_subcommand(c_rand))
      return detail::run_random(method, rank, rank_opt->count() > 0, count, gen_seed,
                                output, err);
    if (app.got_subcommand(c_bench)) return detail::run_bench(count, gen_seed, eof_only, out);
  } catch (const error& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace eof2q::cli
