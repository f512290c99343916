// ppa: generate, verify and query shared-memory execution traces with
// pending-period analysis.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ppa/event_order.hpp"
#include "ppa/frontier.hpp"
#include "ppa/oracle.hpp"
#include "ppa/report.hpp"
#include "ppa/simulator.hpp"

namespace {

namespace fs = std::filesystem;

// Exit codes: 0 pass, 1 consistency violation, 2 I/O-or-format error,
// 3 resource cap exceeded, 64 usage.
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitIoError = 2;
constexpr int kExitCap = 3;
constexpr int kExitUsage = 64;

std::size_t frontier_cap_from_env() {
  const char* env = std::getenv("PPA_FRONTIER_CAP");
  if (env == nullptr || *env == '\0') return ppa::FrontierGraph::kDefaultNodeCap;
  return static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << data;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string sibling_path(const std::string& output, const std::string& tag,
                         const std::string& ext) {
  fs::path p(output);
  fs::path stem = p.parent_path() / p.stem();
  return stem.string() + "." + tag + ext;
}

void emit(const ppa::ordered_json& j, bool pretty) {
  if (pretty) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << j.dump() << "\n";
  }
}

struct GenerateArgs {
  ppa::SimConfig cfg;
  std::uint32_t observe_every = 1;
  std::string fault;
  std::uint64_t fault_seed = 0;
  std::string output;
};

int cmd_generate(const GenerateArgs& args) {
  ppa::AnnotatedTrace annotated = ppa::generate_execution(args.cfg);
  std::string fault_json;
  if (!args.fault.empty()) {
    ppa::FaultKind kind = ppa::fault_kind_from_name(args.fault);
    auto [mutated, desc] =
        ppa::inject_fault(annotated, kind, args.fault_seed ^ args.cfg.seed);
    annotated = std::move(mutated);
    fault_json = ppa::fault_descriptor_json(desc).dump() + "\n";
  }
  ppa::Trace trace = ppa::sample_observations(annotated, args.observe_every);

  write_file(args.output, ppa::serialize_trace(trace));
  write_file(sibling_path(args.output, "truth", ".jsonl"),
             ppa::serialize_truth(annotated));
  if (!fault_json.empty()) {
    write_file(sibling_path(args.output, "fault", ".json"), fault_json);
  }
  return kExitPass;
}

ppa::AssignedTrace load_assigned(const std::string& path) {
  ppa::Trace trace = ppa::parse_trace(read_file(path));
  ppa::ValidationReport report = ppa::validate_trace(trace);
  if (!report.ok()) {
    throw std::runtime_error("trace invalid: " +
                             ppa::validation_report_json(report).dump());
  }
  return ppa::assign_pending_periods(std::move(trace));
}

struct VerifyArgs {
  std::string input;
  bool use_oracle = false;
  bool memoize = false;
  bool pretty = false;
  bool timing = false;
  unsigned jobs = 1;
};

std::pair<ppa::Verdict, std::uint64_t> verify_one(const VerifyArgs& args,
                                                  const std::string& path) {
  ppa::AssignedTrace at = load_assigned(path);
  auto t0 = std::chrono::steady_clock::now();
  ppa::Verdict v;
  if (args.use_oracle) {
    v = ppa::oracle_verify_sc(at);
  } else {
    ppa::VerifyOptions opts;
    opts.memoize_failures = args.memoize;
    v = ppa::verify_sc(at, opts);
  }
  auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  return {std::move(v), static_cast<std::uint64_t>(us)};
}

int cmd_verify(const VerifyArgs& args) {
  if (!fs::is_directory(args.input)) {
    auto [verdict, us] = verify_one(args, args.input);
    emit(ppa::verdict_report(verdict, args.timing
                                          ? std::optional<std::uint64_t>(us)
                                          : std::nullopt),
         args.pretty);
    return verdict.pass ? kExitPass : kExitFail;
  }

  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(args.input)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl" &&
        entry.path().string().find(".truth.") == std::string::npos) {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());

  struct Result {
    ppa::ordered_json report;
    int code = kExitPass;
  };
  std::vector<Result> results(files.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= files.size()) return;
      try {
        auto [verdict, us] = verify_one(args, files[i]);
        results[i].report = ppa::verdict_report(
            verdict,
            args.timing ? std::optional<std::uint64_t>(us) : std::nullopt);
        results[i].code = verdict.pass ? kExitPass : kExitFail;
      } catch (const std::exception& e) {
        results[i].report = {{"error", e.what()}};
        results[i].code = kExitIoError;
      }
    }
  };
  unsigned jobs = std::max(1u, args.jobs);
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int code = kExitPass;
  for (std::size_t i = 0; i < files.size(); ++i) {
    ppa::ordered_json line;
    line["file"] = fs::path(files[i]).filename().string();
    line["report"] = results[i].report;
    emit(line, args.pretty);
    code = std::max(code, results[i].code);
  }
  return code;
}

struct QueryArgs {
  std::string input;
  ppa::OpId u = 0;
  ppa::OpId v = 0;
  bool pretty = false;
};

int cmd_query(const QueryArgs& args) {
  ppa::AssignedTrace at = load_assigned(args.input);
  ppa::FrontierGraph fg(at, frontier_cap_from_env());
  ppa::OrderAnswer answer = ppa::order_query(fg, args.u, args.v);
  emit(ppa::order_answer_report(answer), args.pretty);
  return kExitPass;
}

struct StatsArgs {
  std::string input;
  bool pretty = false;
};

int cmd_stats(const StatsArgs& args) {
  ppa::AssignedTrace at = load_assigned(args.input);
  ppa::FrontierGraph fg(at, frontier_cap_from_env());
  emit(ppa::stats_report(at, fg), args.pretty);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pending-period analysis for shared-memory execution traces"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "generate an SC-legal execution (optionally fault-injected)");
  generate->add_option("--procs", gen.cfg.num_procs, "processors")
      ->check(CLI::PositiveNumber);
  generate->add_option("--ops", gen.cfg.ops_per_proc, "ops per processor")
      ->check(CLI::PositiveNumber);
  generate->add_option("--addrs", gen.cfg.num_addrs, "distinct addresses")
      ->check(CLI::PositiveNumber);
  generate
      ->add_option("--max-pending", gen.cfg.max_pending_len,
                   "upper bound B on pending-period length")
      ->check(CLI::PositiveNumber);
  generate->add_option("--gap-max", gen.cfg.gap_max, "max issue gap")
      ->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.cfg.seed, "rng seed");
  generate
      ->add_option("--observe-every,-m", gen.observe_every,
                   "observe one op out of every m per processor")
      ->check(CLI::PositiveNumber);
  generate->add_option(
      "--fault", gen.fault,
      "inject fault: stale-read|reorder-po|lost-write|bad-period");
  generate->add_option("--fault-seed", gen.fault_seed, "fault site seed");
  generate->add_option("-o,--output", gen.output, "trace output path")
      ->required();

  VerifyArgs ver;
  CLI::App* verify =
      app.add_subcommand("verify", "verify sequential consistency");
  verify->add_option("input", ver.input, "trace file or directory")->required();
  verify->add_flag("--oracle", ver.use_oracle,
                   "use the exhaustive oracle (small traces only)");
  verify->add_flag("--memoize", ver.memoize,
                   "memoize failed search states (off by default)");
  verify->add_flag("--pretty", ver.pretty, "human-readable JSON");
  verify->add_flag("--timing", ver.timing, "include elapsed_ticks in stats");
  verify->add_option("--jobs", ver.jobs, "concurrent workers for a directory")
      ->check(CLI::PositiveNumber);

  QueryArgs query;
  CLI::App* q = app.add_subcommand("query", "must/could happened-before");
  q->add_option("input", query.input, "trace file")->required();
  q->add_option("--u", query.u, "first op id")->required();
  q->add_option("--v", query.v, "second op id")->required();
  q->add_flag("--pretty", query.pretty, "human-readable JSON");

  StatsArgs stats;
  CLI::App* st = app.add_subcommand("stats", "trace and frontier-graph stats");
  st->add_option("input", stats.input, "trace file")->required();
  st->add_flag("--pretty", stats.pretty, "human-readable JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (verify->parsed()) return cmd_verify(ver);
    if (q->parsed()) return cmd_query(query);
    if (st->parsed()) return cmd_stats(stats);
  } catch (const ppa::FrontierCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const ppa::OracleCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const ppa::TraceTooSmall& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ppa::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitUsage;
}
