// A small, deterministic, deliberately vulnerable web application used as
// the system under test. It listens on two local ports: a plain one and a
// "secure" one (also plain TCP, standing in for HTTPS).
//
// Toggles:
//   V1  /admin/startSlave is served to any authenticated user
//   V2  login succeeds on the plain port
//   V3  /download serves any path of the virtual file system
//   V4  signup keeps an existing session id

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "smrlmt/config.hpp"

namespace httplib {
class Server;
struct Request;
struct Response;
}  // namespace httplib

namespace smrlmt {

struct FixtureOptions {
  bool v1 = false;
  bool v2 = false;
  bool v3 = false;
  bool v4 = false;
  std::string host = "127.0.0.1";
  int port = 0;         // 0: any free port
  int secure_port = 0;  // 0: any free port

  /// "V1,V3" style list; empty means patched. Throws ConfigError.
  static FixtureOptions fromVulnList(std::string_view list);
  static FixtureOptions all() { return {true, true, true, true}; }
};

class FixtureServer {
 public:
  explicit FixtureServer(FixtureOptions opts = {});
  ~FixtureServer();
  FixtureServer(const FixtureServer&) = delete;
  FixtureServer& operator=(const FixtureServer&) = delete;

  /// Binds both ports and starts serving. Throws std::runtime_error when a
  /// port is taken.
  void start();
  void stop();

  /// Forgets every session and restarts the session-id counter.
  void reset();

  int port() const { return port_; }
  int securePort() const { return secure_port_; }
  const FixtureOptions& options() const { return opts_; }

  /// Target description for crawling/testing this instance.
  TargetConfig targetConfig() const;

  /// Paths offered to RandomFilePath(): real files, decoys, an image, and
  /// traversal attempts.
  static std::vector<std::string> pathCorpus();

 private:
  struct SessionState {
    std::string user;  // empty: anonymous
  };

  void routes(httplib::Server& srv, bool secure);
  void handle(const httplib::Request& req, httplib::Response& res, bool secure);
  const SessionState* session(const httplib::Request& req, std::string* sid = nullptr) const;
  std::string newSession(const std::string& user);

  FixtureOptions opts_;
  std::unique_ptr<httplib::Server> plain_;
  std::unique_ptr<httplib::Server> secure_;
  std::thread plain_thread_;
  std::thread secure_thread_;
  int port_ = 0;
  int secure_port_ = 0;

  std::mutex mu_;
  std::map<std::string, SessionState> sessions_;
  std::uint64_t next_sid_ = 0;
};

}  // namespace smrlmt
