// Crawl results and the persisted data pool that feeds metamorphic testing.
//
// On disk a pool is a directory:
//   users.json    users taking part in the collection
//   graph.json    one state graph per user (states + edges)
//   inputs.json   derived input sequences
//   outputs.json  recorded pages per (user, input sequence)
//   outputs/      page bodies, one file per body named by its SHA-256

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "smrlmt/model.hpp"

namespace smrlmt {

class PoolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphState {
  std::string id;
  std::string body;  // representative page
  std::string user;
  std::string url;
  std::vector<std::string> resources;  // img/script/link references on the page

  bool operator==(const GraphState&) const = default;
};

struct GraphEdge {
  std::string from;
  Action action;
  std::string to;

  bool operator==(const GraphEdge&) const = default;
};

struct StateGraph {
  std::vector<GraphState> states;
  std::vector<GraphEdge> edges;
  std::string root;

  const GraphState* find(std::string_view id) const;
  std::vector<const GraphEdge*> outgoing(std::string_view id) const;

  bool operator==(const StateGraph&) const = default;
};

struct RecordedOutput {
  std::string user;
  OutputSequence output;

  bool operator==(const RecordedOutput&) const = default;
};

/// Origin-independent key for URL reachability: path plus sorted query.
std::string reachabilityKey(std::string_view url);

struct DataPool {
  std::vector<User> users;
  std::map<std::string, StateGraph> graphs;  // by user id
  std::vector<InputSequence> inputs;
  std::vector<RecordedOutput> outputs;

  const User* findUser(std::string_view id) const;
  const InputSequence* findInput(std::string_view id) const;

  /// Union of the URLs on the edges of the user's graph, as reachability keys.
  std::set<std::string> reachableUrls(std::string_view user) const;

  /// Every page recorded for the user during collection.
  std::vector<const Page*> pagesOf(std::string_view user) const;

  bool operator==(const DataPool&) const = default;
};

/// Writes the pool into `dir`, which must not exist or be empty.
void savePool(const DataPool& pool, const std::filesystem::path& dir);
DataPool loadPool(const std::filesystem::path& dir);

}  // namespace smrlmt
