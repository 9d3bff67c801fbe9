#include "smrlmt/collector.hpp"

#include <deque>
#include <fstream>
#include <regex>
#include <sstream>

#include "smrlmt/levenshtein.hpp"

namespace smrlmt {

namespace {

bool matches(const std::string& pattern, const std::string& text) {
  if (pattern.empty() || text.empty()) return false;
  try {
    return std::regex_search(text, std::regex(pattern, std::regex::icase));
  } catch (const std::regex_error& e) {
    throw ConfigError("bad pattern '" + pattern + "': " + e.what());
  }
}

bool isTextLike(const std::string& type) { return type == "text" || type == "email"; }

bool credentialForm(const HtmlForm& form) {
  bool pass = false, text = false;
  for (const auto& f : form.fields) {
    pass = pass || f.type == "password";
    text = text || isTextLike(f.type);
  }
  return pass && text;
}

bool formMatches(const HtmlForm& form, const std::string& url, const std::string& pattern) {
  std::string path = url;
  try {
    path = Url::parse(url).path;
  } catch (const std::invalid_argument&) {
  }
  return matches(pattern, path) || matches(pattern, form.name) || matches(pattern, form.id);
}

}  // namespace

bool looksLikeSignup(const HtmlForm& form, const std::string& action_url, const TargetConfig& cfg) {
  return credentialForm(form) && formMatches(form, action_url, cfg.signup_pattern);
}

bool looksLikeLogin(const HtmlForm& form, const std::string& action_url, const TargetConfig& cfg) {
  return credentialForm(form) && !looksLikeSignup(form, action_url, cfg) &&
         formMatches(form, action_url, cfg.login_pattern);
}

Action formAction(const HtmlForm& form, const Url& page_url, const User* user, const TargetConfig& cfg) {
  Url target = form.action.empty() ? page_url : page_url.resolve(form.action);
  std::string url = target.str();
  bool login = looksLikeLogin(form, url, cfg);
  bool signup = looksLikeSignup(form, url, cfg);
  auto dflt = [&](const std::string& type) {
    auto it = cfg.form_defaults.find(type);
    return it == cfg.form_defaults.end() ? std::string("test") : it->second;
  };
  ParamList data;
  bool radio_done = false;
  bool name_filled = false;
  for (const auto& f : form.fields) {
    if (f.type == "checkbox") {
      data.emplace_back(f.name, f.value.empty() ? "on" : f.value);
    } else if (f.type == "radio") {
      if (!radio_done) data.emplace_back(f.name, f.value);
      radio_done = true;
    } else if (f.type == "submit" || f.type == "hidden" || f.type == "select" || f.type == "textarea") {
      if (f.type != "submit" || !f.value.empty()) data.emplace_back(f.name, f.value);
    } else if (f.type == "password") {
      data.emplace_back(f.name, login && user ? user->password : dflt("password"));
    } else if (login && user && isTextLike(f.type) && !name_filled) {
      data.emplace_back(f.name, user->username);
      name_filled = true;
    } else {
      data.emplace_back(f.name, f.value.empty() ? dflt(f.type) : f.value);
    }
  }
  Action a = Action::formSubmit(form.method, url, std::move(data));
  a.element_locator = "//form[" + std::to_string(form.ordinal) + "]";
  a.is_login = login;
  a.is_signup = signup;
  return a;
}

namespace {

std::string stripFragment(const std::string& href) {
  auto h = href.find('#');
  return h == std::string::npos ? href : href.substr(0, h);
}

}  // namespace

StateGraph crawl(const TargetConfig& cfg, const User& user, Executor& exec, std::chrono::milliseconds budget) {
  const auto deadline = std::chrono::steady_clock::now() + budget;
  Url base;
  try {
    base = Url::parse(cfg.base_url);
  } catch (const std::invalid_argument& e) {
    throw CrawlError(std::string("bad base URL: ") + e.what());
  }

  StateGraph g;
  std::map<std::string, std::vector<Action>> paths;  // state -> replay path
  std::map<std::string, std::string> urls;
  auto stamp = [&](Action a, const Page& p) {
    a.user = user.id;
    a.session = Session{p.session_id, p.session_id.empty() ? std::nullopt : std::optional<std::string>(user.id)};
    return a;
  };

  Action root = Action::request("GET", base.str());
  root.user = user.id;
  InputSequence probe{"probe", {root}, Provenance::Crawled, std::nullopt};
  auto first = exec.execute(probe, true);
  if (first.pages.empty() || first.pages[0].status == 0) throw CrawlError("base URL unreachable: " + cfg.base_url);

  auto addState = [&](const Page& p, std::vector<Action> path) {
    GraphState s;
    s.id = user.id + "-s" + std::to_string(g.states.size());
    s.body = p.body;
    s.user = user.id;
    s.url = p.final_url;
    for (const auto& r : parseHtml(p.body).resources) {
      try {
        s.resources.push_back(Url::parse(p.final_url).resolve(r).str());
      } catch (const std::invalid_argument&) {
      }
    }
    g.states.push_back(s);
    paths[s.id] = std::move(path);
    urls[s.id] = p.final_url.empty() ? base.str() : p.final_url;
    return s.id;
  };
  auto match = [&](const Page& p) -> std::string {
    for (const auto& s : g.states)
      if (pageEqual(s.body, p.body, cfg.state_threshold)) return s.id;
    return "";
  };

  g.root = addState(first.pages[0], {});
  std::deque<std::string> queue{g.root};
  while (!queue.empty()) {
    if (std::chrono::steady_clock::now() >= deadline) break;
    std::string from = queue.front();
    queue.pop_front();
    const std::string body = g.find(from)->body;
    Url here;
    try {
      here = Url::parse(urls[from]);
    } catch (const std::invalid_argument&) {
      continue;
    }
    auto doc = parseHtml(body);

    std::vector<Action> candidates;
    for (const auto& a : doc.anchors) {
      std::string href = stripFragment(a.href);
      if (href.empty() || href.rfind("mailto:", 0) == 0 || href.rfind("javascript:", 0) == 0) continue;
      Url target;
      try {
        target = here.resolve(href);
      } catch (const std::invalid_argument&) {
        continue;
      }
      if (target.origin() != base.origin()) continue;
      Action act = Action::request("GET", target.str());
      act.element_locator = "//a[" + std::to_string(a.ordinal) + "]";
      candidates.push_back(std::move(act));
    }
    for (const auto& f : doc.forms) {
      Action act = formAction(f, here, &user, cfg);
      try {
        if (Url::parse(act.url).origin() != base.origin()) continue;
      } catch (const std::invalid_argument&) {
        continue;
      }
      candidates.push_back(std::move(act));
    }

    for (auto& cand : candidates) {
      if (std::chrono::steady_clock::now() >= deadline) break;
      InputSequence replay{"replay", paths[from], Provenance::Crawled, std::nullopt};
      replay.actions.push_back(cand);
      auto out = exec.execute(replay, true);
      const Page& p = out.pages.back();
      if (p.status == 0) continue;
      Action recorded = stamp(cand, p);
      std::string to = match(p);
      if (to.empty()) {
        auto path = paths[from];
        path.push_back(recorded);
        to = addState(p, std::move(path));
        queue.push_back(to);
      }
      if (to == from) continue;
      auto fp = fingerprintOf(recorded);
      bool dup = false;
      for (const auto* e : g.outgoing(from)) dup = dup || (e->to == to && fingerprintOf(e->action) == fp);
      if (!dup) g.edges.push_back({from, recorded, to});
    }
  }
  return g;
}

std::vector<InputSequence> deriveInputs(const StateGraph& graph, const std::string& id_prefix,
                                        std::size_t max_sequences) {
  std::vector<InputSequence> out;
  if (graph.root.empty()) return out;
  std::vector<const GraphEdge*> path;
  std::vector<std::string> on_path{graph.root};
  auto emit = [&]() {
    InputSequence s;
    s.id = id_prefix + "-" + std::to_string(out.size() + 1);
    for (const auto* e : path) s.actions.push_back(e->action);
    s.provenance = Provenance::Crawled;
    out.push_back(std::move(s));
  };
  auto dfs = [&](auto&& self, const std::string& state) -> void {
    bool leaf = true;
    for (const auto* e : graph.outgoing(state)) {
      if (out.size() >= max_sequences) return;
      leaf = false;
      path.push_back(e);
      if (std::find(on_path.begin(), on_path.end(), e->to) != on_path.end()) {
        emit();
      } else {
        on_path.push_back(e->to);
        self(self, e->to);
        on_path.pop_back();
      }
      path.pop_back();
    }
    if (leaf && !path.empty() && out.size() < max_sequences) emit();
  };
  dfs(dfs, graph.root);
  return out;
}

namespace {

std::vector<std::pair<int, std::string>> scriptStatements(std::string_view text) {
  std::vector<std::pair<int, std::string>> out;
  int line = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos && raw.find_first_not_of(" \t") == hash) continue;
    std::stringstream parts(raw);
    std::string stmt;
    while (std::getline(parts, stmt, ';')) {
      auto b = stmt.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      auto e = stmt.find_last_not_of(" \t\r");
      stmt = stmt.substr(b, e - b + 1);
      if (stmt[0] == '#') break;
      out.emplace_back(line, stmt);
    }
  }
  return out;
}

}  // namespace

InputSequence ingestScript(std::string_view text, const TargetConfig& cfg, const std::string& id) {
  Url base;
  try {
    base = Url::parse(cfg.base_url);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad base URL: ") + e.what());
  }
  InputSequence seq;
  seq.id = id;
  seq.provenance = Provenance::Script;
  ParamList staged;
  ParamList headers;
  std::string last_url;
  int fill_line = 0;
  const User* who = nullptr;

  auto resolve = [&](int line, const std::string& ref) {
    try {
      return base.resolve(ref).str();
    } catch (const std::invalid_argument& e) {
      throw ScriptParseError(line, std::string("bad URL '") + ref + "': " + e.what());
    }
  };
  auto push = [&](Action a) {
    a.headers = headers;
    seq.actions.push_back(std::move(a));
  };

  for (const auto& [line, stmt] : scriptStatements(text)) {
    auto sp = stmt.find_first_of(" \t");
    std::string verb = stmt.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : stmt.substr(stmt.find_first_not_of(" \t", sp));
    if (verb == "visit" || verb == "click") {
      if (rest.empty()) throw ScriptParseError(line, verb + " needs a target");
      last_url = resolve(line, rest);
      Action a = Action::request("GET", last_url);
      if (verb == "click") a.element_locator = rest;
      push(std::move(a));
    } else if (verb == "fill") {
      std::istringstream words(rest);
      std::string w;
      bool any = false;
      while (words >> w) {
        auto eq = w.find('=');
        if (eq == std::string::npos || eq == 0) throw ScriptParseError(line, "fill expects name=value, got '" + w + "'");
        staged.emplace_back(w.substr(0, eq), w.substr(eq + 1));
        any = true;
      }
      if (!any) throw ScriptParseError(line, "fill needs at least one name=value");
      fill_line = line;
    } else if (verb == "submit") {
      std::string target = rest.empty() ? last_url : resolve(line, rest);
      if (target.empty()) throw ScriptParseError(line, "submit without a visited page or target");
      Action a = Action::formSubmit("POST", target, staged);
      bool pass = false, other = false;
      for (const auto& [k, v] : staged) {
        bool p = k.find("pass") != std::string::npos || k.find("pwd") != std::string::npos;
        pass = pass || p;
        other = other || !p;
      }
      std::string path = Url::parse(target).path;
      if (pass && other) {
        a.is_signup = matches(cfg.signup_pattern, path);
        a.is_login = !a.is_signup && matches(cfg.login_pattern, path);
      }
      if (a.is_login)
        for (const auto& [k, v] : staged)
          for (const auto& u : cfg.users)
            if (u.username == v) who = &u;
      staged.clear();
      fill_line = 0;
      push(std::move(a));
    } else if (verb == "header") {
      auto colon = rest.find(':');
      if (colon == std::string::npos || colon == 0) throw ScriptParseError(line, "header expects <name>: <value>");
      std::string name = rest.substr(0, colon);
      std::string value = rest.substr(colon + 1);
      value.erase(0, value.find_first_not_of(" \t"));
      headers.emplace_back(name, value);
    } else {
      throw ScriptParseError(line, "unknown verb '" + verb + "'");
    }
  }
  if (fill_line) throw ScriptParseError(fill_line, "fill without a following submit");
  if (seq.actions.empty()) throw ScriptParseError(1, "script has no actions");
  if (who)
    for (auto& a : seq.actions) a.user = who->id;
  return seq;
}

InputSequence ingestScriptFile(const std::filesystem::path& file, const TargetConfig& cfg, const std::string& id) {
  std::ifstream in(file);
  if (!in) throw ScriptParseError(0, "cannot read script " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ingestScript(ss.str(), cfg, id);
}

DataPool collect(const TargetConfig& cfg, const ExecutorFactory& make_executor) {
  if (cfg.users.empty()) throw ConfigError("no credentials configured");
  DataPool pool;
  pool.users = cfg.users;
  for (const auto& u : cfg.users) {
    auto exec = make_executor();
    StateGraph g = crawl(cfg, u, *exec, cfg.crawl_budget);
    auto inputs = deriveInputs(g, u.id);
    for (const auto& in : inputs) pool.outputs.push_back({u.id, exec->execute(in, true)});
    pool.inputs.insert(pool.inputs.end(), inputs.begin(), inputs.end());
    pool.graphs[u.id] = std::move(g);
  }
  auto exec = make_executor();
  std::size_t n = 0;
  for (const auto& file : cfg.scripts) {
    auto seq = ingestScriptFile(file, cfg, "script-" + std::to_string(++n));
    std::string owner = seq.actions.front().user.value_or("");
    pool.outputs.push_back({owner, exec->execute(seq, true)});
    pool.inputs.push_back(std::move(seq));
  }
  return pool;
}

}  // namespace smrlmt
