#include "pmc/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <mutex>
#include <sstream>

namespace pmc {

namespace {

bool executable_on_path(const std::string& name, std::string* resolved) {
  if (name.find('/') != std::string::npos) {
    if (access(name.c_str(), X_OK) == 0) {
      if (resolved) *resolved = name;
      return true;
    }
    return false;
  }
  const char* path = getenv("PATH");
  if (!path) return false;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    std::string full = dir + "/" + name;
    if (access(full.c_str(), X_OK) == 0) {
      if (resolved) *resolved = full;
      return true;
    }
  }
  return false;
}

std::vector<std::string> split_command(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

// Recycles identical solver processes across sessions; spawning the wasm
// shim is expensive compared to a (reset).
class SessionPool {
 public:
  static SessionPool& instance() {
    static SessionPool pool;
    return pool;
  }

  std::optional<SolverSession::Proc> take(const std::vector<std::string>& command) {
    std::lock_guard<std::mutex> lock(mu_);
    auto& bucket = idle_[key(command)];
    while (!bucket.empty()) {
      SolverSession::Proc p = bucket.back();
      bucket.pop_back();
      if (kill(p.pid, 0) == 0) return p;
      close_proc(p);
    }
    return std::nullopt;
  }

  bool give(const std::vector<std::string>& command, SolverSession::Proc p) {
    std::lock_guard<std::mutex> lock(mu_);
    auto& bucket = idle_[key(command)];
    if (bucket.size() >= 8) return false;
    bucket.push_back(p);
    return true;
  }

  ~SessionPool() {
    for (auto& [k, bucket] : idle_)
      for (auto& p : bucket) close_proc(p);
  }

 private:
  static std::string key(const std::vector<std::string>& command) {
    std::string k;
    for (const auto& c : command) k += c + '\0';
    return k;
  }
  static void close_proc(SolverSession::Proc& p) {
    if (p.pid > 0) {
      kill(p.pid, SIGKILL);
      waitpid(p.pid, nullptr, 0);
    }
    if (p.to_child >= 0) close(p.to_child);
    if (p.from_child >= 0) close(p.from_child);
    if (p.err_child >= 0) close(p.err_child);
  }

  std::mutex mu_;
  std::map<std::string, std::vector<SolverSession::Proc>> idle_;
};

}  // namespace

std::vector<std::string> resolve_solver_command() {
  if (const char* env = getenv("PMC_SOLVER")) {
    auto cmd = split_command(env);
    if (!cmd.empty()) return cmd;
  }
  if (executable_on_path("z3", nullptr)) return {"z3", "-in"};
  std::string shim_dir;
  if (const char* env = getenv("PMC_SHIM_DIR")) shim_dir = env;
#ifdef PMC_SHIM_DIR_DEFAULT
  if (shim_dir.empty()) shim_dir = PMC_SHIM_DIR_DEFAULT;
#endif
  if (!shim_dir.empty() && access((shim_dir + "/shim.js").c_str(), R_OK) == 0 &&
      executable_on_path("node", nullptr))
    return {"node", shim_dir + "/shim.js"};
  throw SolverError(
      "no SMT solver found: set PMC_SOLVER, install z3, or provide the node shim");
}

SolverSession::SolverSession(SolverConfig config) : config_(std::move(config)) {
  if (config_.command.empty()) config_.command = resolve_solver_command();
  auto recycled = SessionPool::instance().take(config_.command);
  if (recycled) {
    adopt(*recycled);
    try {
      send("(reset)");
      expect_success();
      setup_options();
      return;
    } catch (const SolverError&) {
      kill_process();
    }
  }
  spawn();
  setup_options();
}

SolverSession::~SolverSession() {
  try {
    stop();
  } catch (...) {
    kill_process();
  }
}

void SolverSession::adopt(Proc p) {
  pid_ = p.pid;
  to_child_ = p.to_child;
  from_child_ = p.from_child;
  err_child_ = p.err_child;
  in_buffer_.clear();
  stderr_tail_.clear();
  scope_depth_ = 0;
  declared_.clear();
  declared_scope_marks_.clear();
}

void SolverSession::spawn() {
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe))
    throw SolverError("pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw SolverError("fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(in_pipe[0]); close(in_pipe[1]);
    close(out_pipe[0]); close(out_pipe[1]);
    close(err_pipe[0]); close(err_pipe[1]);
    std::vector<char*> argv;
    for (const auto& a : config_.command) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);
  adopt(Proc{static_cast<int>(pid), in_pipe[1], out_pipe[0], err_pipe[0]});
}

void SolverSession::setup_options() {
  send("(set-option :print-success true)");
  expect_success();
  if (config_.produce_cores) {
    send("(set-option :produce-unsat-cores true)");
    expect_success();
  }
  if (config_.timeout_ms > 0) {
    send("(set-option :timeout " + std::to_string(config_.timeout_ms) + ")");
    expect_success();
  }
  send("(set-logic QF_LIA)");
  expect_success();
}

std::string SolverSession::drain_stderr() {
  if (err_child_ < 0) return stderr_tail_;
  char buf[4096];
  ssize_t n;
  while ((n = read(err_child_, buf, sizeof buf)) > 0) {
    stderr_tail_.append(buf, static_cast<std::size_t>(n));
    if (stderr_tail_.size() > 2000)
      stderr_tail_.erase(0, stderr_tail_.size() - 2000);
  }
  return stderr_tail_;
}

void SolverSession::kill_process() {
  int pid = pid_.exchange(-1);
  if (pid > 0) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
  }
  if (to_child_ >= 0) { close(to_child_); to_child_ = -1; }
  if (from_child_ >= 0) { close(from_child_); from_child_ = -1; }
  if (err_child_ >= 0) { close(err_child_); err_child_ = -1; }
}

void SolverSession::die(const std::string& why) {
  drain_stderr();
  std::string tail = stderr_tail_;
  kill_process();
  if (!why.empty() && tail.empty()) tail = why;
  throw SessionDeadError(tail);
}

void SolverSession::send(const std::string& line) {
  if (pid_ <= 0) throw SessionDeadError(stderr_tail_);
  std::string payload = line + "\n";
  std::size_t off = 0;
  while (off < payload.size()) {
    ssize_t n = write(to_child_, payload.data() + off, payload.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      die("write failed: " + std::string(strerror(errno)));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SolverSession::read_reply(std::optional<unsigned> timeout_ms, bool* timed_out) {
  if (timed_out) *timed_out = false;
  auto deadline = std::chrono::steady_clock::now();
  if (timeout_ms) deadline += std::chrono::milliseconds(*timeout_ms);
  for (;;) {
    auto nl = in_buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = in_buffer_.substr(0, nl);
      in_buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return line;
    }
    if (pid_ <= 0) throw SessionDeadError(stderr_tail_);
    int wait_ms = -1;
    if (timeout_ms) {
      auto now = std::chrono::steady_clock::now();
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      if (left <= 0) {
        if (timed_out) {
          *timed_out = true;
          kill_process();
          return "";
        }
        die("reply deadline exceeded");
      }
      wait_ms = static_cast<int>(left);
    }
    struct pollfd pfd{from_child_, POLLIN, 0};
    int rc = poll(&pfd, 1, wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      die("poll failed");
    }
    if (rc == 0) continue;  // loop re-evaluates the deadline
    char buf[65536];
    ssize_t n = read(from_child_, buf, sizeof buf);
    if (n <= 0) die(n == 0 ? "solver closed its output" : "read failed");
    in_buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

void SolverSession::expect_success() {
  std::string line = read_reply(std::nullopt, nullptr);
  if (line == "success") return;
  if (line.rfind("(error", 0) == 0) throw ProtocolError(line);
  throw ProtocolError(line);
}

void SolverSession::declare_int(const std::string& name, bool nonneg) {
  if (declared_.count(name)) return;
  send("(declare-const " + name + " Int)");
  expect_success();
  if (nonneg) {
    send("(assert (>= " + name + " 0))");
    expect_success();
  }
  declared_.insert(name);
  declared_order_.push_back(name);
}

void SolverSession::assert_term(const TermPtr& term) {
  send("(assert " + term->smt() + ")");
  expect_success();
}

std::string SolverSession::assert_named(const TermPtr& term) {
  std::string label = "q" + std::to_string(label_counter_++);
  send("(assert (! " + term->smt() + " :named " + label + "))");
  expect_success();
  return label;
}

void SolverSession::push() {
  send("(push 1)");
  expect_success();
  declared_scope_marks_.push_back(declared_order_.size());
  ++scope_depth_;
}

void SolverSession::pop() {
  if (scope_depth_ <= 0) throw SolverError("pop with no open scope");
  send("(pop 1)");
  expect_success();
  // Declarations made inside the popped scope are gone on the solver side;
  // forget them here as well so they can be re-declared later.
  std::size_t mark = declared_scope_marks_.back();
  declared_scope_marks_.pop_back();
  while (declared_order_.size() > mark) {
    declared_.erase(declared_order_.back());
    declared_order_.pop_back();
  }
  --scope_depth_;
}

SatResult SolverSession::check_sat(std::optional<unsigned> timeout_ms) {
  ++queries_;
  send("(check-sat)");
  std::optional<unsigned> effective = timeout_ms;
  if (!effective && config_.timeout_ms > 0) effective = config_.timeout_ms * 2 + 500;
  bool timed_out = false;
  std::string line = read_reply(effective, &timed_out);
  if (timed_out) return {SatResult::Kind::Unknown, "timeout"};
  SatResult r;
  if (line == "sat") r.kind = SatResult::Kind::Sat;
  else if (line == "unsat") r.kind = SatResult::Kind::Unsat;
  else if (line == "unknown") {
    r.kind = SatResult::Kind::Unknown;
    r.unknown_reason = "solver";
  } else if (line.rfind("(error", 0) == 0) {
    throw ProtocolError(line);
  } else {
    throw ProtocolError(line);
  }
  return r;
}

namespace {

// Parses "((x 3) (y (- 2)))" into name -> value.
std::map<std::string, std::int64_t> parse_values(const std::string& s) {
  std::map<std::string, std::int64_t> out;
  std::size_t i = 0;
  auto skip_ws = [&] { while (i < s.size() && isspace(static_cast<unsigned char>(s[i]))) ++i; };
  skip_ws();
  if (i >= s.size() || s[i] != '(') throw ProtocolError(s);
  ++i;
  for (;;) {
    skip_ws();
    if (i >= s.size()) throw ProtocolError(s);
    if (s[i] == ')') break;
    if (s[i] != '(') throw ProtocolError(s);
    ++i;
    skip_ws();
    std::size_t start = i;
    while (i < s.size() && !isspace(static_cast<unsigned char>(s[i])) && s[i] != ')') ++i;
    std::string name = s.substr(start, i - start);
    skip_ws();
    bool neg = false;
    if (s[i] == '(') {  // (- k)
      ++i;
      skip_ws();
      if (s[i] != '-') throw ProtocolError(s);
      ++i;
      skip_ws();
      neg = true;
    } else if (s[i] == '-') {
      neg = true;
      ++i;
    }
    start = i;
    while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) ++i;
    std::int64_t val = std::stoll(s.substr(start, i - start));
    if (neg) val = -val;
    skip_ws();
    if (s[i] == ')') ++i;  // close (- k)
    skip_ws();
    if (i >= s.size() || s[i] != ')') throw ProtocolError(s);
    ++i;
    out[name] = val;
  }
  return out;
}

}  // namespace

std::map<std::string, std::int64_t> SolverSession::get_values(
    const std::vector<std::string>& vars) {
  if (vars.empty()) return {};
  std::string cmd = "(get-value (";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) cmd += " ";
    cmd += vars[i];
  }
  cmd += "))";
  send(cmd);
  std::string line = read_reply(std::nullopt, nullptr);
  if (line.rfind("(error", 0) == 0) throw ProtocolError(line);
  return parse_values(line);
}

std::set<std::string> SolverSession::get_unsat_core() {
  send("(get-unsat-core)");
  std::string line = read_reply(std::nullopt, nullptr);
  if (line.rfind("(error", 0) == 0) throw ProtocolError(line);
  std::set<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    while (!tok.empty() && (tok.front() == '(')) tok.erase(tok.begin());
    while (!tok.empty() && (tok.back() == ')')) tok.pop_back();
    if (!tok.empty()) out.insert(tok);
  }
  return out;
}

void SolverSession::interrupt() {
  int pid = pid_.load();
  if (pid > 0) kill(pid, SIGKILL);
}

void SolverSession::stop() {
  if (pid_ <= 0) return;
  // Healthy sessions go back to the pool after a reset.
  Proc p{pid_.load(), to_child_, from_child_, err_child_};
  bool pooled = false;
  try {
    send("(reset)");
    expect_success();
    pooled = SessionPool::instance().give(config_.command, p);
  } catch (const SolverError&) {
    pooled = false;
  }
  if (pooled) {
    pid_ = -1;
    to_child_ = from_child_ = err_child_ = -1;
  } else {
    kill_process();
  }
}

}  // namespace pmc
