#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "patic/errors.hpp"
#include "patic/oracle.hpp"

namespace patic {

namespace {

constexpr const char* kProtocol = "patic-oracle/1";

void ignore_sigpipe() {
  static bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

}  // namespace

ProcessBackend::ProcessBackend(std::vector<std::string> argv, ProcessOptions options)
    : argv_(std::move(argv)), options_(options) {
  if (argv_.empty()) throw OracleUnavailable("empty oracle command");
  ignore_sigpipe();
  try {
    start();
  } catch (...) {
    stop();
    throw;
  }
}

ProcessBackend::~ProcessBackend() { stop(); }

std::string ProcessBackend::describe() const {
  std::string out;
  for (const auto& a : argv_) out += (out.empty() ? "" : " ") + a;
  return out;
}

void ProcessBackend::start() {
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0) throw OracleUnavailable(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw OracleUnavailable(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);
  pid_t pid = ::fork();
  if (pid < 0) throw OracleUnavailable(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();

  std::string line = read_line();
  nlohmann::json hello;
  try {
    hello = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    stop();
    throw ProtocolError("bad handshake: " + line);
  }
  if (!hello.is_object() || hello.value("protocol", "") != kProtocol) {
    stop();
    throw ProtocolError("unsupported oracle protocol: " + line);
  }
  top_k_ = hello.value("top_k", 1);
  concurrent_ = hello.value("concurrent", false);
}

void ProcessBackend::stop() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    // Closing stdin asks the child to exit; give it a moment before killing.
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      ::usleep(2000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string ProcessBackend::read_line() {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(options_.timeout_seconds);
  while (true) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw OracleUnavailable("oracle timed out: " + describe());
    pollfd pfd{from_child_, POLLIN, 0};
    int r = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) throw OracleUnavailable("oracle timed out: " + describe());
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw OracleUnavailable("oracle process closed its output: " + describe());
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ProcessBackend::write_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw OracleUnavailable("oracle process closed its input: " + describe());
    off += static_cast<std::size_t>(n);
  }
}

Prediction ProcessBackend::predict(const std::string& source) {
  std::lock_guard lock(io_mutex_);
  while (true) {
    try {
      if (pid_ < 0) start();
      std::uint64_t id = next_id_++;
      write_line(nlohmann::json{{"id", id}, {"source", source}}.dump());
      std::string line = read_line();
      nlohmann::json resp;
      try {
        resp = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        throw ProtocolError("oracle response is not JSON: " + line);
      }
      if (!resp.is_object() || !resp.contains("id") || !resp["id"].is_number_unsigned() ||
          resp["id"].get<std::uint64_t>() != id || !resp.contains("predictions"))
        throw ProtocolError("oracle response does not answer request " + std::to_string(id) + ": " + line);
      return prediction_from_json(resp["predictions"]);
    } catch (const OracleUnavailable&) {
      stop();
      if (restarts_ >= options_.max_restarts) throw;
      ++restarts_;
    }
  }
}

}  // namespace patic
