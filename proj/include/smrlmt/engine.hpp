// The metamorphic testing loop: one MR.run per combination of circular
// views over the input types a relation uses, with failure deduplication.

#pragma once

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "smrlmt/relation.hpp"

namespace smrlmt {

inline constexpr std::size_t kRandomPoolSize = 100;
inline const std::vector<std::string> kHttpMethods = {"GET", "POST", "PUT", "DELETE", "HEAD", "OPTIONS", "PATCH"};

/// Ordered pools per input type. The view of a type with N items is the
/// pool rotated left by the current offset; nextView advances the offset by
/// one, so N calls cycle back to the original order.
class DataProvider : public DataView {
 public:
  void setPool(const std::string& type, std::vector<Value> items);
  bool hasPool(const std::string& type) const { return pools_.count(type) != 0; }
  std::size_t size(const std::string& type) const;

  Value item(const std::string& type, std::int64_t index) const override;

  bool hasMoreViews(const std::string& type) const;
  void nextView(const std::string& type);
  /// Makes all views of `type` available again without moving the offset.
  void resetViews(const std::string& type);

  std::size_t offset(const std::string& type) const;
  std::map<std::string, std::size_t> offsets() const { return offsets_; }
  void setOffsets(const std::map<std::string, std::size_t>& offsets);

  /// The current view of `type` as a list.
  std::vector<Value> view(const std::string& type) const;

  /// Pools for every type in `types` from the collected data and target
  /// configuration. Random pools hold kRandomPoolSize seeded draws.
  static DataProvider fromPool(const DataPool& pool, const TargetConfig& cfg, const std::vector<std::string>& types);

 private:
  std::map<std::string, std::vector<Value>> pools_;
  std::map<std::string, std::size_t> offsets_;
  std::map<std::string, std::size_t> consumed_;
};

/// Input types a relation draws from, in lexicographic order.
std::vector<std::string> extractSourceInputTypes(const CompiledRelation& rel);

/// Reported failures plus the union of every request fingerprint seen so
/// far. A failure is reported when it issues at least one request outside
/// that union; the first failure is always reported.
class FailureLog {
 public:
  bool addFailure(FailureRecord record, const std::set<RequestFingerprint>& requests);

  const std::vector<FailureRecord>& reported() const { return reported_; }
  std::size_t raw() const { return raw_; }
  const std::set<RequestFingerprint>& seen() const { return seen_; }

 private:
  std::vector<FailureRecord> reported_;
  std::set<RequestFingerprint> seen_;
  std::size_t raw_ = 0;
};

/// Requests that identify a failure: those of the follow-up inputs, or of the
/// source inputs when the relation built no follow-up.
std::set<RequestFingerprint> failureRequests(const FailureRecord& f);

struct CampaignOptions {
  std::chrono::milliseconds budget = std::chrono::hours(24);
  /// Parallel mode needs stateless == true, workers > 1 and a factory; each
  /// worker gets its own executor.
  std::size_t workers = 1;
  bool stateless = false;
  ExecutorFactory make_executor;
};

struct CampaignResult {
  std::string relation;
  std::vector<std::string> types;
  std::vector<FailureRecord> failures;  // after deduplication
  std::size_t raw_failures = 0;
  std::size_t runs = 0;
  bool truncated = false;  // budget expired before all combinations ran
};

/// Runs `rel` over every combination of views, outer types advancing after
/// the inner ones are exhausted. Throws ProviderError when a type has no pool.
CampaignResult executeMetamorphicTesting(const CompiledRelation& rel, DataProvider& provider, ExecutionContext ctx,
                                         const CampaignOptions& opts = {});

nlohmann::json campaignToJson(const CampaignResult& r);

/// Runs every relation against the target with its own budget and returns
/// the campaign report: timestamps, seed, and one entry per relation. The
/// executor is an HttpExecutor built from `cfg`.
nlohmann::json runCampaigns(const DataPool& pool, const TargetConfig& cfg,
                            const std::vector<dsl::RelationAst>& relations, std::chrono::milliseconds budget,
                            std::ostream* transcript = nullptr);

/// Human-readable table of a campaign report document.
std::string renderSummary(const nlohmann::json& report);

}  // namespace smrlmt
