// smrlmt: check MR sources, crawl a target, run test campaigns, render
// reports, serve the fixture app.
//
// Exit codes: 0 success, 1 MR failures found (test) or diagnostics (check),
// 2 usage, configuration or runtime error.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "smrlmt/catalog.hpp"
#include "smrlmt/collector.hpp"
#include "smrlmt/config.hpp"
#include "smrlmt/dsl/checker.hpp"
#include "smrlmt/dsl/parser.hpp"
#include "smrlmt/engine.hpp"
#include "smrlmt/fixture.hpp"
#include "smrlmt/pool.hpp"

namespace fs = std::filesystem;
using namespace smrlmt;

namespace {

constexpr int kOk = 0;
constexpr int kFailures = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw UsageError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses one file; syntax errors become diagnostics.
std::vector<dsl::RelationAst> parseFile(const std::string& file, const std::string& text,
                                        std::vector<std::pair<std::string, dsl::Diagnostic>>& diags) {
  try {
    return dsl::parseSource(text);
  } catch (const dsl::LexError& e) {
    diags.push_back({file, {e.pos, dsl::Severity::Error, e.what()}});
  } catch (const dsl::ParseError& e) {
    diags.push_back({file, {e.pos, dsl::Severity::Error, e.what()}});
  }
  return {};
}

int cmdCheck(const std::vector<std::string>& files) {
  std::vector<std::pair<std::string, dsl::Diagnostic>> diags;
  std::set<std::string> names;
  for (const auto& f : files) {
    for (const auto& r : parseFile(f, readFile(f), diags)) {
      for (auto& d : dsl::diagnose(r)) diags.push_back({f, d});
      if (!names.insert(r.qualifiedName()).second)
        diags.push_back({f, {r.pos, dsl::Severity::Error, "duplicate relation " + r.qualifiedName()}});
    }
  }
  bool errors = false;
  for (const auto& [file, d] : diags) {
    std::cerr << dsl::format(d, file) << "\n";
    if (d.severity == dsl::Severity::Error) errors = true;
  }
  return errors ? kFailures : kOk;
}

// A file path loads every relation in it; anything else is a catalog name.
std::vector<dsl::RelationAst> resolveRelations(const std::vector<std::string>& args) {
  std::vector<dsl::RelationAst> out;
  if (args.empty()) {
    for (auto& [name, ast] : loadCatalog()) out.push_back(std::move(ast));
    return out;
  }
  for (const auto& a : args) {
    if (fs::is_regular_file(a)) {
      for (auto& r : dsl::parseSource(readFile(a))) out.push_back(dsl::check(r));
      continue;
    }
    const CatalogEntry* e = findCatalogEntry(a);
    if (!e) throw UsageError("unknown relation or file: " + a);
    for (auto& r : dsl::parseSource(e->source)) out.push_back(dsl::check(r));
  }
  return out;
}

int cmdCrawl(const std::string& target, const std::string& out, bool verbose) {
  if (fs::exists(out) && !(fs::is_directory(out) && fs::is_empty(out)))
    throw UsageError("pool directory already exists: " + out);
  TargetConfig cfg = loadTargetConfig(target);
  DataPool pool = collect(cfg, [&]() -> std::unique_ptr<Executor> {
    auto e = std::make_unique<HttpExecutor>(cfg);
    if (verbose) e->setTranscript(&std::clog);
    return e;
  });
  savePool(pool, out);
  std::ofstream(fs::path(out) / "target.toml") << renderTargetConfig(cfg);
  for (const auto& [user, g] : pool.graphs)
    std::cout << user << ": " << g.states.size() << " states, " << g.edges.size() << " edges\n";
  std::cout << pool.inputs.size() << " input sequences written to " << out << "\n";
  return kOk;
}

struct TestArgs {
  std::string pool;
  std::string target;
  std::vector<std::string> relations;
  std::string budget = "10m";
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::string report;
  bool verbose = false;
};

int cmdTest(const TestArgs& a) {
  DataPool pool = loadPool(a.pool);
  fs::path target = a.target.empty() ? fs::path(a.pool) / "target.toml" : fs::path(a.target);
  if (!fs::exists(target)) throw UsageError("no target configuration at " + target.string());
  TargetConfig cfg = loadTargetConfig(target);
  if (a.seed) cfg.seed = *a.seed;
  if (a.threshold) {
    if (*a.threshold < 0 || *a.threshold > 1) throw UsageError("--page-eq-threshold must lie in [0, 1]");
    cfg.page_eq_threshold = *a.threshold;
  }
  auto relations = resolveRelations(a.relations);
  auto report = runCampaigns(pool, cfg, relations, parseDuration(a.budget), a.verbose ? &std::clog : nullptr);
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw UsageError("cannot write " + a.report);
    out << report.dump(2) << "\n";
  }
  std::cout << renderSummary(report);
  for (const auto& r : report["relations"])
    if (!r["failures"].empty()) return kFailures;
  return kOk;
}

int cmdReport(const std::string& file) {
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(readFile(file));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(file + ": " + e.what());
  }
  std::cout << renderSummary(report);
  return kOk;
}

int cmdServe(const std::string& vulns, int port, int secure_port) {
  FixtureOptions opts = FixtureOptions::fromVulnList(vulns);
  opts.port = port;
  opts.secure_port = secure_port;

  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);  // server threads inherit the mask

  FixtureServer server(opts);
  server.start();
  std::cout << "fixture listening on http://" << opts.host << ":" << server.port() << " (plain) and http://"
            << opts.host << ":" << server.securePort() << " (secure)\n"
            << std::flush;
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metamorphic security testing for web systems"};
  app.require_subcommand(1);

  std::vector<std::string> check_files;
  auto* check = app.add_subcommand("check", "Parse and validate MR sources");
  check->add_option("files", check_files, "DSL files (.smrl)")->required()->check(CLI::ExistingFile);

  std::string crawl_target, crawl_out;
  bool crawl_verbose = false;
  auto* crawl = app.add_subcommand("crawl", "Crawl the target and write a data pool");
  crawl->add_option("--target", crawl_target, "target configuration")->required()->check(CLI::ExistingFile);
  crawl->add_option("--out", crawl_out, "new pool directory")->required();
  crawl->add_flag("--verbose", crawl_verbose, "log every request to stderr");

  TestArgs targs;
  auto* test = app.add_subcommand("test", "Run metamorphic testing over a data pool");
  test->add_option("--pool", targs.pool, "pool directory")->required()->check(CLI::ExistingDirectory);
  test->add_option("--target", targs.target, "target configuration (default: <pool>/target.toml)");
  test->add_option("--relations", targs.relations, "MR files or catalog names (default: whole catalog)")
      ->delimiter(',');
  test->add_option("--budget", targs.budget, "time budget per relation, e.g. 90s, 10m, 24h")->capture_default_str();
  test->add_option("--seed", targs.seed, "seed for random pools (default: config, else 42)");
  test->add_option("--page-eq-threshold", targs.threshold, "page equality threshold (default 0.05)");
  test->add_option("--report", targs.report, "write the JSON report here");
  test->add_flag("--verbose", targs.verbose, "log every request to stderr");

  std::string report_file;
  auto* report = app.add_subcommand("report", "Render a campaign report");
  report->add_option("report", report_file, "campaign JSON")->required()->check(CLI::ExistingFile);

  auto* fixture = app.add_subcommand("fixture", "The bundled vulnerable web app");
  fixture->require_subcommand(1);
  std::string vulns;
  int port = 8080, secure_port = 8443;
  auto* serve = fixture->add_subcommand("serve", "Serve the fixture until interrupted");
  serve->add_option("--vuln", vulns, "seeded vulnerabilities, e.g. V1,V3 or ALL");
  serve->add_option("--port", port, "plain port")->capture_default_str();
  serve->add_option("--secure-port", secure_port, "secure port")->capture_default_str();

  auto* catalog = app.add_subcommand("catalog", "Bundled metamorphic relations");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "List catalog relations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmdCheck(check_files);
    if (*crawl) return cmdCrawl(crawl_target, crawl_out, crawl_verbose);
    if (*test) return cmdTest(targs);
    if (*report) return cmdReport(report_file);
    if (*serve) return cmdServe(vulns, port, secure_port);
    if (*list) {
      for (const auto& e : catalogEntries()) std::cout << e.name << "\t" << e.file << "\n";
      return kOk;
    }
  } catch (const dsl::SemError& e) {
    for (const auto& d : e.diagnostics) std::cerr << dsl::format(d, "<relation>") << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
