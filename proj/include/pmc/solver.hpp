#ifndef PMC_SOLVER_HPP
#define PMC_SOLVER_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pmc/common.hpp"
#include "pmc/encoding.hpp"

namespace pmc {

struct SolverError : Error {
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

struct SessionDeadError : SolverError {
  std::string stderr_tail;
  explicit SessionDeadError(const std::string& tail)
      : SolverError("solver process died" + (tail.empty() ? "" : (": " + tail))),
        stderr_tail(tail) {}
};

struct ProtocolError : SolverError {
  std::string line;
  explicit ProtocolError(const std::string& offending)
      : SolverError("unexpected solver reply: " + offending), line(offending) {}
};

struct SolverConfig {
  std::vector<std::string> command;  // argv; empty means discover
  unsigned timeout_ms = 0;           // per check-sat; 0 = no limit
  bool produce_cores = false;

  bool operator==(const SolverConfig& o) const = default;
};

// Locates a usable solver command: $PMC_SOLVER if set, a z3 binary on the
// path, else the bundled SMT-LIB shim run through node.
std::vector<std::string> resolve_solver_command();

struct SatResult {
  enum class Kind { Sat, Unsat, Unknown };
  Kind kind = Kind::Unknown;
  std::string unknown_reason;

  bool sat() const { return kind == Kind::Sat; }
  bool unsat() const { return kind == Kind::Unsat; }
};

// One external solver process speaking the SMT-LIB text protocol. Owned by a
// single thread at a time; interrupt() may be called from another thread.
class SolverSession {
 public:
  explicit SolverSession(SolverConfig config);
  ~SolverSession();
  SolverSession(SolverSession&&) = delete;
  SolverSession& operator=(SolverSession&&) = delete;

  void declare_int(const std::string& name, bool nonneg = true);
  void assert_term(const TermPtr& term);
  std::string assert_named(const TermPtr& term);  // label for core extraction
  void push();
  void pop();
  int scope_depth() const { return scope_depth_; }

  SatResult check_sat(std::optional<unsigned> timeout_ms = std::nullopt);
  std::map<std::string, std::int64_t> get_values(const std::vector<std::string>& vars);
  std::set<std::string> get_unsat_core();

  void interrupt();
  void stop();  // graceful shutdown; the process may be recycled
  bool alive() const { return pid_ > 0; }

  const SolverConfig& config() const { return config_; }
  std::uint64_t queries_issued() const { return queries_; }

 private:
  friend class SessionPool;
  struct Proc {
    int pid = -1;
    int to_child = -1;
    int from_child = -1;
    int err_child = -1;
  };

  void spawn();
  void adopt(Proc p);
  void setup_options();
  void send(const std::string& line);
  std::string read_reply(std::optional<unsigned> timeout_ms, bool* timed_out);
  void expect_success();
  void kill_process();
  std::string drain_stderr();
  [[noreturn]] void die(const std::string& why);

  SolverConfig config_;
  std::atomic<int> pid_{-1};
  int to_child_ = -1;
  int from_child_ = -1;
  int err_child_ = -1;
  std::string in_buffer_;
  std::string stderr_tail_;
  int scope_depth_ = 0;
  std::uint64_t label_counter_ = 0;
  std::uint64_t queries_ = 0;
  std::set<std::string> declared_;
  std::vector<std::string> declared_order_;
  std::vector<std::size_t> declared_scope_marks_;
};

}  // namespace pmc

#endif
