#include "smrlmt/relation.hpp"

#include <algorithm>
#include <random>

#include "smrlmt/dsl/library.hpp"
#include "smrlmt/levenshtein.hpp"

namespace smrlmt {

using namespace dsl;

std::string kindName(const Value& v) {
  static const char* names[] = {"nothing", "boolean", "int",  "string",  "Input", "Action",
                                "User",    "Session", "Page", "Output", "list",  "range"};
  return names[v.v.index()];
}

std::regex compilePattern(const std::string& pattern) {
  try {
    if (pattern.rfind("(?i)", 0) == 0)
      return std::regex(pattern.substr(4), std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    return std::regex(pattern, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw ConfigError("bad regular expression '" + pattern + "': " + e.what());
  }
}

WebEnvironment WebEnvironment::build(const DataPool& pool, const TargetConfig& cfg) {
  WebEnvironment env;
  env.users = pool.users;
  for (const auto& u : pool.users) {
    env.reachable[u.id] = pool.reachableUrls(u.id);
    std::set<std::string> seen;
    auto& bodies = env.retrieved[u.id];
    auto add = [&](const std::string& body) {
      if (seen.insert(contentHash(body)).second) bodies.push_back(body);
    };
    for (const Page* p : pool.pagesOf(u.id)) add(p->body);
    if (auto g = pool.graphs.find(u.id); g != pool.graphs.end())
      for (const auto& s : g->second.states) add(s.body);
  }
  for (const auto& [a, b] : cfg.supervisors) {
    if (!pool.findUser(a) || !pool.findUser(b))
      throw ConfigError("supervision pair " + a + ">" + b + " names an unknown user");
    env.supervisors.emplace_back(a, b);
  }
  for (const auto& p : cfg.error_patterns) env.error_patterns.push_back(compilePattern(p));
  env.page_eq_threshold = cfg.page_eq_threshold;
  return env;
}

const User* WebEnvironment::findUser(const std::string& id) const {
  for (const auto& u : users)
    if (u.id == id) return &u;
  return nullptr;
}

bool WebEnvironment::isError(const Page& p) const {
  if (p.status == 0 || p.status >= 400) return true;
  for (const auto& re : error_patterns)
    if (std::regex_search(p.body, re)) return true;
  return false;
}

bool WebEnvironment::isSupervisorOf(const std::string& a, const std::string& b) const {
  if (!supervisors.empty())
    return std::find(supervisors.begin(), supervisors.end(), std::make_pair(a, b)) != supervisors.end();
  auto ra = reachable.find(a), rb = reachable.find(b);
  static const std::set<std::string> none;
  const auto& sa = ra == reachable.end() ? none : ra->second;
  const auto& sb = rb == reachable.end() ? none : rb->second;
  return std::includes(sa.begin(), sa.end(), sb.begin(), sb.end());
}

bool WebEnvironment::canRetrieve(const std::string& user, const Page& p) const {
  auto it = retrieved.find(user);
  if (it == retrieved.end()) return false;
  for (const auto& body : it->second)
    if (pageEqual(body, p.body, page_eq_threshold)) return true;
  return false;
}

bool valuesEqual(const Value& a, const Value& b, double t) {
  if (a.v.index() != b.v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.v);
        if constexpr (std::is_same_v<T, std::monostate>) {
          return true;
        } else if constexpr (std::is_same_v<T, InputPtr>) {
          return x->actions == y->actions;
        } else if constexpr (std::is_same_v<T, ActionRef>) {
          return x.action() == y.action();
        } else if constexpr (std::is_same_v<T, User> || std::is_same_v<T, Session>) {
          return x.id == y.id;
        } else if constexpr (std::is_same_v<T, PagePtr>) {
          return pageEqual(x->body, y->body, t);
        } else if constexpr (std::is_same_v<T, OutputPtr>) {
          if (x->pages.size() != y->pages.size()) return false;
          for (std::size_t i = 0; i < x->pages.size(); ++i)
            if (!pageEqual(x->pages[i].body, y->pages[i].body, t)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, ListPtr>) {
          if (x->size() != y->size()) return false;
          for (std::size_t i = 0; i < x->size(); ++i)
            if (!valuesEqual((*x)[i], (*y)[i], t)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, IntRange>) {
          return x.lo == y.lo && x.hi == y.hi;
        } else {
          return x == y;
        }
      },
      a.v);
}

namespace {

std::size_t checkedPos(std::int64_t pos, std::size_t size, const char* what) {
  if (pos < 1 || static_cast<std::size_t>(pos) > size)
    throw IndexError(std::string(what) + " position " + std::to_string(pos) + " out of range 1.." +
                     std::to_string(size));
  return static_cast<std::size_t>(pos - 1);
}

bool containsCi(const std::string& s, std::string_view needle) {
  auto it = std::search(s.begin(), s.end(), needle.begin(), needle.end(),
                        [](char a, char b) { return std::tolower(static_cast<unsigned char>(a)) == b; });
  return it != s.end();
}

}  // namespace

InputSequence changeCredentials(const InputSequence& seq, const User& user) {
  InputSequence out = seq;
  for (auto& a : out.actions) {
    a.user = user.id;
    if (!a.is_login) continue;
    Param* pass = nullptr;
    Param* name = nullptr;
    for (auto& p : a.form_data) {
      if (!pass && containsCi(p.first, "pass")) pass = &p;
    }
    for (auto& p : a.form_data) {
      if (&p == pass) continue;
      if (containsCi(p.first, "user") || containsCi(p.first, "login") || containsCi(p.first, "email") ||
          containsCi(p.first, "name")) {
        name = &p;
        break;
      }
    }
    if (!name)
      for (auto& p : a.form_data)
        if (&p != pass) {
          name = &p;
          break;
        }
    if (name) name->second = user.username;
    if (pass) pass->second = user.password;
  }
  return out;
}

InputSequence copyActionTo(const InputSequence& seq, std::int64_t from, std::int64_t to) {
  auto src = checkedPos(from, seq.actions.size(), "source action");
  auto dst = checkedPos(to, seq.actions.size() + 1, "target action");
  InputSequence out = seq;
  Action copy = seq.actions[src];
  out.actions.insert(out.actions.begin() + static_cast<std::ptrdiff_t>(dst), std::move(copy));
  return out;
}

InputSequence insertAction(const InputSequence& seq, std::int64_t pos, const Action& action) {
  auto dst = checkedPos(pos, seq.actions.size() + 1, "action");
  InputSequence out = seq;
  out.actions.insert(out.actions.begin() + static_cast<std::ptrdiff_t>(dst), action);
  return out;
}

InputSequence replaceAction(const InputSequence& seq, std::int64_t pos, const Action& action) {
  auto dst = checkedPos(pos, seq.actions.size(), "action");
  InputSequence out = seq;
  out.actions[dst] = action;
  return out;
}

InputSequence setParameterValue(const InputSequence& seq, std::int64_t action_pos, std::int64_t param_pos,
                                const std::string& value) {
  auto a = checkedPos(action_pos, seq.actions.size(), "action");
  InputSequence out = seq;
  auto& act = out.actions[a];
  auto p = checkedPos(param_pos, act.parameterCount(), "parameter");
  act.parameter(p + 1).second = value;
  return out;
}

Value randomValueOf(const std::string& type, std::uint64_t draw) {
  if (type == "int") return {static_cast<std::int64_t>(draw % 1000000)};
  if (type == "boolean") return {static_cast<bool>(draw & 1)};
  if (type == "string") {
    static constexpr char alnum[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::mt19937_64 rng(draw);
    std::uniform_int_distribution<std::size_t> pick(0, sizeof(alnum) - 2);
    std::string s;
    for (int i = 0; i < 8; ++i) s += alnum[pick(rng)];
    return {s};
  }
  throw EvalError("RandomValue: unsupported type " + type);
}

namespace {

// One MR.run invocation.
class Run {
 public:
  Run(const DataView& view, ExecutionContext& ctx) : view_(view), ctx_(ctx) {}

  RunResult operator()(const RelationAst& ast) {
    scopes_.emplace_back();
    result_.holds = block(ast.body);
    for (const auto& s : result_.source_inputs)
      if (auto it = outputs_.find(s.id); it != outputs_.end()) result_.outputs.push_back(*it->second);
    for (const auto& s : result_.follow_up_inputs)
      if (auto it = outputs_.find(s.id); it != outputs_.end()) result_.outputs.push_back(*it->second);
    return std::move(result_);
  }

 private:
  struct Slot {
    Value value;
    std::string alias_name;  // set when the variable stands for a designator
    std::int64_t alias_index = 0;
  };

  double threshold() const { return ctx_.env ? ctx_.env->page_eq_threshold : 0.05; }

  [[noreturn]] static void fail(const Expr& e, const std::string& msg) {
    throw EvalError(std::to_string(e.pos.line) + ":" + std::to_string(e.pos.col) + ": " + msg);
  }

  template <class T>
  T need(const Expr& e, const Value& v, const char* what) {
    if (!v.is<T>()) fail(e, std::string("expected ") + what + ", got " + kindName(v));
    return v.as<T>();
  }

  bool block(const std::vector<Statement>& body) {
    for (const auto& st : body)
      if (!statement(st)) return false;
    return true;
  }

  bool statement(const Statement& st) {
    if (auto f = std::get_if<ForLoop>(&st.node)) {
      Value it = eval(f->iterable);
      auto iteration = [&](Value v) {
        scopes_.emplace_back();
        scopes_.back()[f->var] = Slot{std::move(v), {}, 0};
        bool ok = block(f->body);
        scopes_.pop_back();
        return ok;
      };
      if (it.is<IntRange>()) {
        for (auto i = it.as<IntRange>().lo; i <= it.as<IntRange>().hi; ++i)
          if (!iteration(Value{i})) return false;
      } else {
        auto list = need<ListPtr>(f->iterable, it, "list or range");
        for (const auto& v : *list)
          if (!iteration(v)) return false;
      }
      return true;
    }
    if (auto d = std::get_if<VarDecl>(&st.node)) {
      Slot slot;
      auto fn = std::get_if<DataFnExpr>(&d->init.node);
      if (fn && isInputDesignator(fn->name)) {
        slot.alias_name = fn->name;
        slot.alias_index = index(d->init, fn->args);
      } else {
        slot.value = eval(d->init);
      }
      scopes_.back()[d->name] = std::move(slot);
      return true;
    }
    const auto& e = std::get<ExprStmt>(st.node).expr;
    bool ok = boolean(e);
    if (!ok) {
      for (const auto& in : statement_follow_ups_) result_.follow_up_inputs.push_back(*in);
    }
    // follow-up inputs live only for one metamorphic expression
    bindings_.clear();
    statement_follow_ups_.clear();
    return ok;
  }

  bool boolean(const Expr& e) { return need<bool>(e, eval(e), "boolean"); }

  const Slot* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(name); f != it->end()) return &f->second;
    return nullptr;
  }

  std::int64_t index(const Expr& e, const std::vector<Expr>& args) {
    if (args.empty()) return 1;
    auto i = need<std::int64_t>(args[0], eval(args[0]), "int index");
    if (i < 1) fail(e, "data function index must be positive, got " + std::to_string(i));
    return i;
  }

  static std::string key(const std::string& name, std::int64_t i) { return name + "(" + std::to_string(i) + ")"; }

  Value designator(const std::string& name, std::int64_t i) {
    auto k = key(name, i);
    if (auto b = bindings_.find(k); b != bindings_.end()) return b->second;
    Value v = view_.item(name, i);
    if (fetched_.insert(k).second && v.is<InputPtr>()) {
      const auto& in = *v.as<InputPtr>();
      bool known = std::any_of(result_.source_inputs.begin(), result_.source_inputs.end(),
                               [&](const InputSequence& s) { return s.id == in.id; });
      if (!known) result_.source_inputs.push_back(in);
    }
    return v;
  }

  InputPtr stamp(InputSequence seq, const std::string& origin_id, Provenance origin) {
    std::string parent = origin == Provenance::FollowUp && seq.parent ? *seq.parent : origin_id;
    seq.id = parent + "/f" + std::to_string(++follow_up_counter_);
    seq.provenance = Provenance::FollowUp;
    seq.parent = parent;
    return std::make_shared<const InputSequence>(std::move(seq));
  }

  InputPtr derived(InputSequence seq, const InputSequence& from) { return stamp(std::move(seq), from.id, from.provenance); }

  OutputPtr output(const InputPtr& in) {
    if (auto it = outputs_.find(in->id); it != outputs_.end()) return it->second;
    if (!ctx_.executor) throw EvalError("no executor available to run input " + in->id);
    auto out = std::make_shared<const OutputSequence>(ctx_.executor->execute(*in, true));
    ++result_.executions;
    outputs_[in->id] = out;
    return out;
  }

  bool equal(const Expr& e, const MetaOpExpr& m) {
    const Expr& target = m.args[0];
    std::string name;
    std::int64_t i = 0;
    if (auto fn = std::get_if<DataFnExpr>(&target.node); fn && isInputDesignator(fn->name)) {
      name = fn->name;
      i = index(target, fn->args);
    } else if (auto var = std::get_if<VarRef>(&target.node)) {
      const Slot* s = lookup(var->name);
      if (s && !s->alias_name.empty()) {
        name = s->alias_name;
        i = s->alias_index;
      }
    }
    if (name.empty()) return valuesEqual(eval(target), eval(m.args[1]), threshold());
    auto k = key(name, i);
    if (bindings_.count(k) || fetched_.count(k)) return valuesEqual(designator(name, i), eval(m.args[1]), threshold());
    Value v = eval(m.args[1]);
    if (v.is<InputPtr>()) {
      auto in = v.as<InputPtr>();
      if (in->provenance != Provenance::FollowUp) in = derived(*in, *in);
      statement_follow_ups_.push_back(in);
      v = Value{in};
    }
    if (name == "Input" && !v.is<InputPtr>()) fail(e, "cannot bind Input to " + kindName(v));
    bindings_[k] = std::move(v);
    return true;
  }

  bool metaOp(const Expr& e, const MetaOpExpr& m) {
    switch (m.op) {
      case MetaOp::True: return true;
      case MetaOp::False: return false;
      case MetaOp::Not: return !boolean(m.args.at(0));
      case MetaOp::And:
        for (const auto& a : m.args)
          if (!boolean(a)) return false;
        return true;
      case MetaOp::Or:
        for (const auto& a : m.args)
          if (boolean(a)) return true;
        return false;
      case MetaOp::Implies:
        return !boolean(m.args.at(0)) || boolean(m.args.at(1));
      case MetaOp::Equal:
        return equal(e, m);
    }
    return false;
  }

  Value dataFn(const Expr& e, const DataFnExpr& fn) {
    if (isInputDesignator(fn.name)) return designator(fn.name, index(e, fn.args));
    if (fn.name == "Output") {
      auto in = need<InputPtr>(fn.args.at(0), eval(fn.args.at(0)), "Input");
      auto out = output(in);
      if (fn.args.size() == 1) return {out};
      auto n = need<std::int64_t>(fn.args[1], eval(fn.args[1]), "int");
      auto idx = checkedPos(n, out->pages.size(), "output page");
      return {PagePtr(out, &out->pages[idx])};
    }
    if (fn.name == "RandomValue") {
      auto type = need<std::string>(fn.args.at(0), eval(fn.args.at(0)), "string");
      auto draw = need<std::int64_t>(e, view_.item("RandomValue", 1), "int draw");
      return randomValueOf(type, static_cast<std::uint64_t>(draw));
    }
    return view_.item(fn.name, 1);
  }

  User userOf(const Action& a) const {
    if (!a.user) return User{};
    if (ctx_.env)
      if (const User* u = ctx_.env->findUser(*a.user)) return *u;
    return User{*a.user, *a.user, "", ""};
  }

  const WebEnvironment& env(const Expr& e) {
    if (!ctx_.env) fail(e, "no web environment available");
    return *ctx_.env;
  }

  Value call(const Expr& e, const CallExpr& c) {
    std::vector<Value> a;
    for (const auto& arg : c.args) a.push_back(eval(arg));
    auto arg = [&](std::size_t i) -> const Value& { return a.at(i); };
    auto input = [&](std::size_t i) { return need<InputPtr>(c.args[i], arg(i), "Input"); };
    auto action = [&](std::size_t i) { return need<ActionRef>(c.args[i], arg(i), "Action"); };
    auto user = [&](std::size_t i) { return need<User>(c.args[i], arg(i), "User"); };
    auto page = [&](std::size_t i) { return need<PagePtr>(c.args[i], arg(i), "Page"); };
    auto integer = [&](std::size_t i) { return need<std::int64_t>(c.args[i], arg(i), "int"); };
    auto string = [&](std::size_t i) { return need<std::string>(c.args[i], arg(i), "string"); };
    const std::string& n = c.name;

    if (n == "changeCredentials") {
      auto in = input(0);
      return {derived(changeCredentials(*in, user(1)), *in)};
    }
    if (n == "copyActionTo") {
      auto in = input(0);
      return {derived(copyActionTo(*in, integer(1), integer(2)), *in)};
    }
    if (n == "insertAction" || n == "replaceAction") {
      auto in = input(0);
      const Action& act = action(2).action();
      auto seq = n == "insertAction" ? insertAction(*in, integer(1), act) : replaceAction(*in, integer(1), act);
      return {derived(std::move(seq), *in)};
    }
    if (n == "setParameterValue") {
      auto in = input(0);
      return {derived(setParameterValue(*in, integer(1), integer(2), string(3)), *in)};
    }
    if (n == "setChannel") {
      ActionRef ref = action(0);
      Action copy = ref.action();
      try {
        copy.setChannel(channelFromString(string(1)));
      } catch (const std::invalid_argument& ex) {
        fail(e, ex.what());
      }
      ref.detached = std::make_shared<const Action>(std::move(copy));
      return {ref};
    }
    if (n == "parameterCount") return {static_cast<std::int64_t>(action(0).action().parameterCount())};
    if (n == "isLogin") return {action(0).action().is_login};
    if (n == "isSignup") return {action(0).action().is_signup};
    if (n == "afterLogin") {
      ActionRef ref = action(0);
      if (!ref.seq) return {false};
      for (std::size_t i = 0; i < ref.index && i < ref.seq->actions.size(); ++i)
        if (ref.seq->actions[i].is_login) return {true};
      return {false};
    }
    if (n == "sessionIdOf") return {page(0)->session_id};
    if (n == "isError") return {env(e).isError(*page(0))};
    if (n == "cannotReachThroughGUI") {
      const auto& reach = env(e).reachable;
      auto it = reach.find(user(0).id);
      return {it == reach.end() || !it->second.count(reachabilityKey(string(1)))};
    }
    if (n == "isSupervisorOf") return {env(e).isSupervisorOf(user(0).id, user(1).id)};
    if (n == "userCanRetrieveContent") {
      const auto& w = env(e);
      auto u = user(0);
      if (arg(1).is<OutputPtr>()) {
        for (const auto& p : arg(1).as<OutputPtr>()->pages)
          if (!w.canRetrieve(u.id, p)) return {false};
        return {true};
      }
      return {w.canRetrieve(u.id, *page(1))};
    }
    fail(e, "unresolved function " + n);
  }

  Value field(const Expr& e, const FieldAccess& f) {
    Value obj = eval(*f.object);
    const std::string& n = f.field;
    auto bad = [&]() -> Value { fail(e, "unknown field ." + n + " on " + kindName(obj)); };
    if (obj.is<InputPtr>()) {
      const auto& in = obj.as<InputPtr>();
      if (n == "length") return {static_cast<std::int64_t>(in->actions.size())};
      if (n == "id") return {in->id};
      if (n == "actions") {
        auto list = std::make_shared<std::vector<Value>>();
        for (std::size_t i = 0; i < in->actions.size(); ++i) list->push_back({ActionRef{in, i, nullptr}});
        return {ListPtr(std::move(list))};
      }
      return bad();
    }
    if (obj.is<ActionRef>()) {
      const auto& ref = obj.as<ActionRef>();
      const Action& a = ref.action();
      if (n == "url") return {a.fullUrl()};
      if (n == "method") return {a.method};
      if (n == "position") return {ref.position()};
      if (n == "channel") return {std::string(toString(a.channel))};
      if (n == "user") return {userOf(a)};
      if (n == "session") return {a.session};
      if (n == "parameters") {
        auto list = std::make_shared<std::vector<Value>>();
        for (std::size_t i = 1; i <= a.parameterCount(); ++i) {
          const auto& p = a.parameter(i);
          list->push_back({p.first + "=" + p.second});
        }
        return {ListPtr(std::move(list))};
      }
      return bad();
    }
    if (obj.is<User>()) {
      const auto& u = obj.as<User>();
      if (n == "id") return {u.id};
      if (n == "username") return {u.username};
      if (n == "role") return {u.role};
      return bad();
    }
    if (obj.is<Session>()) {
      if (n == "id") return {obj.as<Session>().id};
      return bad();
    }
    if (obj.is<PagePtr>()) {
      const auto& p = obj.as<PagePtr>();
      if (n == "status") return {static_cast<std::int64_t>(p->status)};
      if (n == "sessionId") return {p->session_id};
      if (n == "body") return {p->body};
      if (n == "url") return {p->final_url};
      return bad();
    }
    if (obj.is<OutputPtr>()) {
      const auto& o = obj.as<OutputPtr>();
      if (n == "length") return {static_cast<std::int64_t>(o->pages.size())};
      if (n == "pages") {
        auto list = std::make_shared<std::vector<Value>>();
        for (const auto& p : o->pages) list->push_back({PagePtr(o, &p)});
        return {ListPtr(std::move(list))};
      }
      return bad();
    }
    if (n == "length") {
      if (obj.is<std::string>()) return {static_cast<std::int64_t>(obj.as<std::string>().size())};
      if (obj.is<ListPtr>()) return {static_cast<std::int64_t>(obj.as<ListPtr>()->size())};
    }
    return bad();
  }

  Value eval(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> Value {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, IntLit>) {
            return {n.value};
          } else if constexpr (std::is_same_v<N, StringLit>) {
            return {n.value};
          } else if constexpr (std::is_same_v<N, BoolLit>) {
            return {n.value};
          } else if constexpr (std::is_same_v<N, VarRef>) {
            const Slot* s = lookup(n.name);
            if (!s) fail(e, "unresolved variable " + n.name);
            if (!s->alias_name.empty()) return designator(s->alias_name, s->alias_index);
            return s->value;
          } else if constexpr (std::is_same_v<N, MetaOpExpr>) {
            return {metaOp(e, n)};
          } else if constexpr (std::is_same_v<N, DataFnExpr>) {
            return dataFn(e, n);
          } else if constexpr (std::is_same_v<N, CallExpr>) {
            return call(e, n);
          } else if constexpr (std::is_same_v<N, CompareExpr>) {
            Value l = eval(*n.lhs), r = eval(*n.rhs);
            if (n.op == CompareOp::Eq) return {valuesEqual(l, r, threshold())};
            if (n.op == CompareOp::Ne) return {!valuesEqual(l, r, threshold())};
            auto a = need<std::int64_t>(*n.lhs, l, "int"), b = need<std::int64_t>(*n.rhs, r, "int");
            switch (n.op) {
              case CompareOp::Lt: return {a < b};
              case CompareOp::Le: return {a <= b};
              case CompareOp::Gt: return {a > b};
              default: return {a >= b};
            }
          } else if constexpr (std::is_same_v<N, ArithExpr>) {
            auto a = need<std::int64_t>(*n.lhs, eval(*n.lhs), "int");
            auto b = need<std::int64_t>(*n.rhs, eval(*n.rhs), "int");
            return {n.op == ArithOp::Add ? a + b : a - b};
          } else if constexpr (std::is_same_v<N, RangeExpr>) {
            auto lo = need<std::int64_t>(*n.lo, eval(*n.lo), "int");
            auto hi = need<std::int64_t>(*n.hi, eval(*n.hi), "int");
            return {IntRange{lo, hi}};
          } else {
            return field(e, n);
          }
        },
        e.node);
  }

  const DataView& view_;
  ExecutionContext& ctx_;
  RunResult result_;
  std::vector<std::map<std::string, Slot>> scopes_;
  std::map<std::string, Value> bindings_;
  std::set<std::string> fetched_;
  std::vector<InputPtr> statement_follow_ups_;
  std::map<std::string, OutputPtr> outputs_;
  std::size_t follow_up_counter_ = 0;
};

std::int64_t constantIndex(const Expr& e) {
  if (auto i = std::get_if<IntLit>(&e.node)) return i->value;
  if (auto a = std::get_if<ArithExpr>(&e.node)) {
    auto l = constantIndex(*a->lhs), r = constantIndex(*a->rhs);
    return a->op == ArithOp::Add ? l + r : l - r;
  }
  return 1;
}

void collectTypes(const Expr& e, std::map<std::string, std::int64_t>& out);

void collectArgs(const std::vector<Expr>& args, std::map<std::string, std::int64_t>& out) {
  for (const auto& a : args) collectTypes(a, out);
}

void collectTypes(const Expr& e, std::map<std::string, std::int64_t>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, DataFnExpr>) {
          if (n.name != "Output") {
            std::int64_t i = 1;
            if (isInputDesignator(n.name) && !n.args.empty()) i = std::max<std::int64_t>(1, constantIndex(n.args[0]));
            auto& slot = out[n.name];
            slot = std::max(slot, i);
          }
          collectArgs(n.args, out);
        } else if constexpr (std::is_same_v<N, CallExpr> || std::is_same_v<N, MetaOpExpr>) {
          collectArgs(n.args, out);
        } else if constexpr (std::is_same_v<N, CompareExpr> || std::is_same_v<N, ArithExpr>) {
          collectTypes(*n.lhs, out);
          collectTypes(*n.rhs, out);
        } else if constexpr (std::is_same_v<N, RangeExpr>) {
          collectTypes(*n.lo, out);
          collectTypes(*n.hi, out);
        } else if constexpr (std::is_same_v<N, FieldAccess>) {
          collectTypes(*n.object, out);
        }
      },
      e.node);
}

void collectTypes(const std::vector<Statement>& body, std::map<std::string, std::int64_t>& out) {
  for (const auto& st : body) {
    if (auto f = std::get_if<ForLoop>(&st.node)) {
      collectTypes(f->iterable, out);
      collectTypes(f->body, out);
    } else if (auto d = std::get_if<VarDecl>(&st.node)) {
      collectTypes(d->init, out);
    } else {
      collectTypes(std::get<ExprStmt>(st.node).expr, out);
    }
  }
}

}  // namespace

RunResult CompiledRelation::run(const DataView& view, ExecutionContext& ctx) const { return Run(view, ctx)(*ast_); }

CompiledRelation compile(const RelationAst& ast) {
  CompiledRelation rel;
  rel.name = ast.qualifiedName();
  rel.ast_ = std::make_shared<const RelationAst>(ast);
  collectTypes(ast.body, rel.referenced_input_types);
  return rel;
}

}  // namespace smrlmt
