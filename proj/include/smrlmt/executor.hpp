// Runs input sequences against the system under test.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "smrlmt/config.hpp"
#include "smrlmt/model.hpp"

namespace smrlmt {

class Executor {
 public:
  virtual ~Executor() = default;

  /// Executes every action in order within one client session and returns
  /// one page per action. Transport failures become status-0 pages.
  virtual OutputSequence execute(const InputSequence& seq, bool fresh_session = true) = 0;
};

using ExecutorFactory = std::function<std::unique_ptr<Executor>()>;

/// The requests `execute` would issue for `seq`, without sending anything.
std::set<RequestFingerprint> recordRequests(const InputSequence& seq);

/// HTTP client with a private cookie jar. HTTP-channel actions go to the
/// configured insecure port, HTTPS ones to the secure port; when the target
/// declares `secure_transport = "plain"` the secure port is spoken to
/// without TLS.
class HttpExecutor : public Executor {
 public:
  explicit HttpExecutor(TargetConfig cfg);
  ~HttpExecutor() override;

  OutputSequence execute(const InputSequence& seq, bool fresh_session = true) override;

  /// Runs one action within the current session.
  Page perform(const Action& action);
  void clearSession();

  /// Newline-delimited JSON, one object per HTTP exchange. Not owned.
  void setTranscript(std::ostream* out) { transcript_ = out; }

  std::size_t requestCount() const { return requests_; }

 private:
  struct Clients;

  std::string sessionCookie() const;
  std::string cookieHeader() const;
  void storeCookies(const std::vector<std::string>& set_cookie);

  TargetConfig cfg_;
  std::unique_ptr<Clients> clients_;
  std::map<std::string, std::string> jar_;
  std::ostream* transcript_ = nullptr;
  std::size_t requests_ = 0;
};

/// Wraps another executor and logs the request fingerprints of everything
/// executed; without an inner executor it answers with empty 200 pages.
class RecordingExecutor : public Executor {
 public:
  explicit RecordingExecutor(Executor* inner = nullptr) : inner_(inner) {}

  OutputSequence execute(const InputSequence& seq, bool fresh_session = true) override;

  std::vector<RequestFingerprint> log() const;
  std::size_t executions() const;

 private:
  Executor* inner_;
  mutable std::mutex mu_;
  std::vector<RequestFingerprint> log_;
  std::size_t executions_ = 0;
};

}  // namespace smrlmt
