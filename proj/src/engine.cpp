#include "smrlmt/engine.hpp"

#include <atomic>
#include <ctime>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

namespace smrlmt {

void DataProvider::setPool(const std::string& type, std::vector<Value> items) {
  pools_[type] = std::move(items);
  offsets_[type] = 0;
  consumed_[type] = 0;
}

std::size_t DataProvider::size(const std::string& type) const {
  auto it = pools_.find(type);
  return it == pools_.end() ? 0 : it->second.size();
}

Value DataProvider::item(const std::string& type, std::int64_t index) const {
  auto it = pools_.find(type);
  if (it == pools_.end()) throw ProviderError("no data pool for " + type);
  const auto& pool = it->second;
  if (index < 1 || static_cast<std::size_t>(index) > pool.size())
    throw ProviderError(type + "(" + std::to_string(index) + ") requested but the view holds " +
                        std::to_string(pool.size()) + " item(s)");
  return pool[(offsets_.at(type) + static_cast<std::size_t>(index) - 1) % pool.size()];
}

bool DataProvider::hasMoreViews(const std::string& type) const {
  auto it = consumed_.find(type);
  return it != consumed_.end() && it->second < size(type);
}

void DataProvider::nextView(const std::string& type) {
  auto n = size(type);
  if (n == 0) throw ProviderError("no data pool for " + type);
  offsets_[type] = (offsets_[type] + 1) % n;
  ++consumed_[type];
}

void DataProvider::resetViews(const std::string& type) { consumed_[type] = 0; }

std::size_t DataProvider::offset(const std::string& type) const {
  auto it = offsets_.find(type);
  return it == offsets_.end() ? 0 : it->second;
}

void DataProvider::setOffsets(const std::map<std::string, std::size_t>& offsets) {
  for (const auto& [type, off] : offsets) {
    auto n = size(type);
    offsets_[type] = n ? off % n : 0;
  }
}

std::vector<Value> DataProvider::view(const std::string& type) const {
  std::vector<Value> out;
  for (std::size_t i = 1; i <= size(type); ++i) out.push_back(item(type, static_cast<std::int64_t>(i)));
  return out;
}

DataProvider DataProvider::fromPool(const DataPool& pool, const TargetConfig& cfg,
                                    const std::vector<std::string>& types) {
  DataProvider p;
  for (const auto& type : types) {
    std::vector<Value> items;
    if (type == "Input") {
      for (const auto& in : pool.inputs) items.push_back({std::make_shared<const InputSequence>(in)});
    } else if (type == "User") {
      for (const auto& u : pool.users) items.push_back({u});
    } else if (type == "Action") {
      for (const auto& in : pool.inputs) {
        auto seq = std::make_shared<const InputSequence>(in);
        for (std::size_t i = 0; i < in.actions.size(); ++i) items.push_back({ActionRef{seq, i, nullptr}});
      }
    } else if (type == "Session") {
      std::set<std::string> seen;
      for (const auto& in : pool.inputs)
        for (const auto& a : in.actions)
          if (!a.session.anonymous() && seen.insert(a.session.id).second) items.push_back({a.session});
    } else if (type == "HttpMethod") {
      for (const auto& m : kHttpMethods) items.push_back({m});
    } else if (type == "RandomFilePath") {
      auto corpus = filePathCorpus(cfg);
      if (corpus.empty()) throw ProviderError("RandomFilePath needs a non-empty file path corpus");
      std::mt19937_64 rng(cfg.seed);
      std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
      for (std::size_t i = 0; i < kRandomPoolSize; ++i) items.push_back({corpus[pick(rng)]});
    } else if (type == "RandomValue") {
      std::mt19937_64 rng(cfg.seed + 1);
      for (std::size_t i = 0; i < kRandomPoolSize; ++i)
        items.push_back({static_cast<std::int64_t>(rng() & 0x7fffffffffffffffULL)});
    } else {
      throw ProviderError("unknown input type " + type);
    }
    p.setPool(type, std::move(items));
  }
  return p;
}

std::vector<std::string> extractSourceInputTypes(const CompiledRelation& rel) {
  std::vector<std::string> out;
  for (const auto& [name, max] : rel.referenced_input_types) out.push_back(name);
  return out;
}

std::set<RequestFingerprint> failureRequests(const FailureRecord& f) {
  std::set<RequestFingerprint> out;
  const auto& inputs = f.follow_up_inputs.empty() ? f.source_inputs : f.follow_up_inputs;
  for (const auto& in : inputs) {
    auto r = recordRequests(in);
    out.insert(r.begin(), r.end());
  }
  return out;
}

bool FailureLog::addFailure(FailureRecord record, const std::set<RequestFingerprint>& requests) {
  ++raw_;
  std::set<RequestFingerprint> novel;
  std::set_difference(requests.begin(), requests.end(), seen_.begin(), seen_.end(),
                      std::inserter(novel, novel.end()));
  if (!reported_.empty() && novel.empty()) return false;
  record.novel_requests = std::move(novel);
  seen_.insert(requests.begin(), requests.end());
  reported_.push_back(std::move(record));
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ran = false;
  RunResult result;
  std::map<std::string, std::size_t> offsets;
};

FailureRecord recordOf(const std::string& relation, RunResult r, std::map<std::string, std::size_t> offsets) {
  FailureRecord f;
  f.relation = relation;
  f.source_inputs = std::move(r.source_inputs);
  f.follow_up_inputs = std::move(r.follow_up_inputs);
  f.outputs = std::move(r.outputs);
  f.view_indices = std::move(offsets);
  return f;
}

// Every combination of view offsets, in the order the sequential loop visits them.
std::vector<std::map<std::string, std::size_t>> enumerate(DataProvider p, const std::vector<std::string>& types) {
  std::vector<std::map<std::string, std::size_t>> out;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == types.size()) {
      out.push_back(p.offsets());
      return;
    }
    p.resetViews(types[i]);
    while (p.hasMoreViews(types[i])) {
      p.nextView(types[i]);
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace

CampaignResult executeMetamorphicTesting(const CompiledRelation& rel, DataProvider& provider, ExecutionContext ctx,
                                         const CampaignOptions& opts) {
  CampaignResult res;
  res.relation = rel.name;
  res.types = extractSourceInputTypes(rel);
  for (const auto& t : res.types)
    if (!provider.hasPool(t) || provider.size(t) == 0) throw ProviderError("empty data pool for " + t);

  const auto deadline = Clock::now() + opts.budget;
  FailureLog log;
  auto consider = [&](RunResult r, const std::map<std::string, std::size_t>& offsets) {
    ++res.runs;
    if (r.holds) return;
    auto rec = recordOf(rel.name, std::move(r), offsets);
    auto requests = failureRequests(rec);
    log.addFailure(std::move(rec), requests);
  };

  const bool parallel = opts.stateless && opts.workers > 1 && opts.make_executor;
  if (!parallel) {
    bool stop = false;
    auto iterate = [&](auto&& self, std::size_t i) -> void {
      if (stop) return;
      if (i == res.types.size()) {
        if (Clock::now() >= deadline) {
          res.truncated = true;
          stop = true;
          return;
        }
        auto offsets = provider.offsets();
        consider(rel.run(provider, ctx), offsets);
        return;
      }
      const auto& type = res.types[i];
      provider.resetViews(type);
      while (!stop && provider.hasMoreViews(type)) {
        provider.nextView(type);
        self(self, i + 1);
      }
    };
    iterate(iterate, 0);
  } else {
    auto combos = enumerate(provider, res.types);
    std::vector<Outcome> outcomes(combos.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> expired{false};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(opts.workers, combos.size()); ++w) {
      pool.emplace_back([&] {
        try {
          auto exec = opts.make_executor();
          ExecutionContext local = ctx;
          local.executor = exec.get();
          DataProvider view = provider;
          for (std::size_t k; (k = next++) < combos.size();) {
            if (Clock::now() >= deadline) {
              expired = true;
              break;
            }
            view.setOffsets(combos[k]);
            outcomes[k] = Outcome{true, rel.run(view, local), combos[k]};
          }
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    // merge in enumeration order so deduplication matches the sequential run
    for (auto& o : outcomes) {
      if (!o.ran) {
        res.truncated = true;
        break;
      }
      consider(std::move(o.result), o.offsets);
    }
    res.truncated = res.truncated || expired;
  }
  res.failures = log.reported();
  res.raw_failures = log.raw();
  return res;
}

nlohmann::json campaignToJson(const CampaignResult& r) {
  nlohmann::json j;
  j["name"] = r.relation;
  j["types"] = r.types;
  j["runs"] = r.runs;
  j["raw_failures"] = r.raw_failures;
  j["truncated"] = r.truncated;
  auto failures = nlohmann::json::array();
  for (const auto& f : r.failures) failures.push_back(failureToJson(f));
  j["failures"] = failures;
  return j;
}

namespace {

std::string utcNow() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

nlohmann::json runCampaigns(const DataPool& pool, const TargetConfig& cfg,
                            const std::vector<dsl::RelationAst>& relations, std::chrono::milliseconds budget,
                            std::ostream* transcript) {
  nlohmann::json report;
  report["started_at"] = utcNow();
  report["seed"] = cfg.seed;
  report["page_eq_threshold"] = cfg.page_eq_threshold;
  const WebEnvironment env = WebEnvironment::build(pool, cfg);
  auto relations_json = nlohmann::json::array();
  for (const auto& ast : relations) {
    CompiledRelation rel = compile(ast);
    DataProvider provider = DataProvider::fromPool(pool, cfg, extractSourceInputTypes(rel));
    HttpExecutor exec(cfg);
    exec.setTranscript(transcript);
    CampaignOptions opts;
    opts.budget = budget;
    opts.workers = cfg.workers;
    opts.stateless = cfg.stateless;
    opts.make_executor = [cfg]() -> std::unique_ptr<Executor> { return std::make_unique<HttpExecutor>(cfg); };
    auto result = executeMetamorphicTesting(rel, provider, ExecutionContext{&exec, &env}, opts);
    relations_json.push_back(campaignToJson(result));
  }
  report["relations"] = relations_json;
  report["finished_at"] = utcNow();
  return report;
}

std::string renderSummary(const nlohmann::json& report) {
  std::ostringstream out;
  out << std::left << std::setw(28) << "relation" << std::right << std::setw(8) << "runs" << std::setw(8) << "raw"
      << std::setw(10) << "reported" << "  note\n";
  std::size_t total = 0;
  for (const auto& r : report.value("relations", nlohmann::json::array())) {
    auto n = r.value("failures", nlohmann::json::array()).size();
    total += n;
    out << std::left << std::setw(28) << r.value("name", "?") << std::right << std::setw(8) << r.value("runs", 0)
        << std::setw(8) << r.value("raw_failures", 0) << std::setw(10) << n << "  "
        << (r.value("truncated", false) ? "budget expired" : "") << "\n";
  }
  out << "\n" << total << " failure(s) reported\n";
  for (const auto& r : report.value("relations", nlohmann::json::array())) {
    for (const auto& f : r.value("failures", nlohmann::json::array())) {
      out << "  " << r.value("name", "?") << ":";
      for (const auto& q : f.value("novel_requests", nlohmann::json::array())) {
        out << " " << q.value("method", "") << " " << q.value("url", "");
        auto params = q.value("params", nlohmann::json::array());
        if (!params.empty()) out << " " << params.dump();
        out << ";";
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace smrlmt
