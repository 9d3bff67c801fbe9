#include "smrlmt/pool.hpp"

#include <fstream>
#include <sstream>

namespace smrlmt {

namespace fs = std::filesystem;
using nlohmann::json;

const GraphState* StateGraph::find(std::string_view id) const {
  for (const auto& s : states)
    if (s.id == id) return &s;
  return nullptr;
}

std::vector<const GraphEdge*> StateGraph::outgoing(std::string_view id) const {
  std::vector<const GraphEdge*> out;
  for (const auto& e : edges)
    if (e.from == id) out.push_back(&e);
  return out;
}

std::string reachabilityKey(std::string_view url) {
  try {
    Url u = Url::parse(url);
    auto params = sortedParams(decodeParams(u.query));
    return params.empty() ? u.path : u.path + "?" + encodeParams(params);
  } catch (const std::invalid_argument&) {
    return std::string(url);
  }
}

const User* DataPool::findUser(std::string_view id) const {
  for (const auto& u : users)
    if (u.id == id) return &u;
  return nullptr;
}

const InputSequence* DataPool::findInput(std::string_view id) const {
  for (const auto& s : inputs)
    if (s.id == id) return &s;
  return nullptr;
}

std::set<std::string> DataPool::reachableUrls(std::string_view user) const {
  std::set<std::string> out;
  auto it = graphs.find(std::string(user));
  if (it == graphs.end()) return out;
  for (const auto& e : it->second.edges) out.insert(reachabilityKey(e.action.fullUrl()));
  return out;
}

std::vector<const Page*> DataPool::pagesOf(std::string_view user) const {
  std::vector<const Page*> out;
  for (const auto& r : outputs)
    if (r.user == user)
      for (const auto& p : r.output.pages) out.push_back(&p);
  return out;
}

namespace {

class BodyStore {
 public:
  explicit BodyStore(fs::path dir) : dir_(std::move(dir)) {}

  std::string put(const std::string& body) {
    auto name = contentHash(body);
    auto path = dir_ / name;
    if (!fs::exists(path)) {
      std::ofstream out(path, std::ios::binary);
      out.write(body.data(), static_cast<std::streamsize>(body.size()));
      if (!out) throw PoolError("cannot write " + path.string());
    }
    return "outputs/" + name;
  }

  std::string get(const std::string& ref) const {
    auto path = dir_.parent_path() / ref;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PoolError("missing page body " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

 private:
  fs::path dir_;
};

json pageToJson(const Page& p, BodyStore& store) {
  return {{"status", p.status},
          {"session_id", p.session_id},
          {"content_type", p.content_type},
          {"final_url", p.final_url},
          {"body", store.put(p.body)}};
}

Page pageFromJson(const json& j, const BodyStore& store) {
  Page p;
  p.status = j.at("status").get<int>();
  if (p.status != 0 && (p.status < 100 || p.status > 599))
    throw PoolError("page status out of range: " + std::to_string(p.status));
  p.session_id = j.value("session_id", "");
  p.content_type = j.value("content_type", "");
  p.final_url = j.value("final_url", "");
  p.body = store.get(j.at("body").get<std::string>());
  return p;
}

void writeJson(const fs::path& file, const json& j) {
  std::ofstream out(file);
  out << j.dump(2) << "\n";
  if (!out) throw PoolError("cannot write " + file.string());
}

json readJson(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw PoolError("cannot read " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw PoolError(file.string() + ": " + e.what());
  }
}

}  // namespace

void savePool(const DataPool& pool, const fs::path& dir) {
  if (fs::exists(dir) && !(fs::is_directory(dir) && fs::is_empty(dir)))
    throw PoolError("refusing to overwrite existing pool directory " + dir.string());
  fs::create_directories(dir / "outputs");
  BodyStore store(dir / "outputs");

  writeJson(dir / "users.json", pool.users);

  json graphs = json::object();
  for (const auto& [user, g] : pool.graphs) {
    json states = json::array();
    for (const auto& s : g.states)
      states.push_back({{"id", s.id}, {"user", s.user}, {"url", s.url}, {"resources", s.resources},
                        {"body", store.put(s.body)}});
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"action", e.action}});
    graphs[user] = {{"root", g.root}, {"states", states}, {"edges", edges}};
  }
  writeJson(dir / "graph.json", graphs);

  writeJson(dir / "inputs.json", pool.inputs);

  json outputs = json::array();
  for (const auto& r : pool.outputs) {
    json pages = json::array();
    for (const auto& p : r.output.pages) pages.push_back(pageToJson(p, store));
    outputs.push_back({{"user", r.user}, {"input", r.output.input}, {"pages", pages}});
  }
  writeJson(dir / "outputs.json", outputs);
}

DataPool loadPool(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw PoolError("no pool directory at " + dir.string());
  BodyStore store(dir / "outputs");
  DataPool pool;
  try {
    pool.users = readJson(dir / "users.json").get<std::vector<User>>();
    std::set<std::string> ids;
    for (const auto& u : pool.users)
      if (!ids.insert(u.id).second) throw PoolError("duplicate user id " + u.id);

    const json graphs = readJson(dir / "graph.json");
    for (const auto& [user, g] : graphs.items()) {
      StateGraph graph;
      graph.root = g.at("root").get<std::string>();
      for (const auto& s : g.at("states")) {
        GraphState st;
        st.id = s.at("id").get<std::string>();
        st.user = s.value("user", user);
        st.url = s.value("url", "");
        st.resources = s.value("resources", std::vector<std::string>{});
        st.body = store.get(s.at("body").get<std::string>());
        graph.states.push_back(std::move(st));
      }
      for (const auto& e : g.at("edges"))
        graph.edges.push_back({e.at("from").get<std::string>(), e.at("action").get<Action>(),
                               e.at("to").get<std::string>()});
      pool.graphs.emplace(user, std::move(graph));
    }

    pool.inputs = readJson(dir / "inputs.json").get<std::vector<InputSequence>>();

    const json outputs = readJson(dir / "outputs.json");
    for (const auto& r : outputs) {
      RecordedOutput rec;
      rec.user = r.at("user").get<std::string>();
      rec.output.input = r.at("input").get<std::string>();
      for (const auto& p : r.at("pages")) rec.output.pages.push_back(pageFromJson(p, store));
      pool.outputs.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw PoolError(dir.string() + ": malformed pool: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw PoolError(dir.string() + ": invalid pool data: " + e.what());
  }
  return pool;
}

}  // namespace smrlmt
