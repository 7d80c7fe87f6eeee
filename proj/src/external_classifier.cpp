#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <utility>

#include <nlohmann/json.hpp>

#include "tscf/classifier.hpp"

namespace tscf {

using nlohmann::json;

namespace {

// Writing to a dead subprocess must surface as EPIPE, not kill the engine.
void ignore_sigpipe_once() {
  static const int dummy = [] {
    struct sigaction sa {};
    sigaction(SIGPIPE, nullptr, &sa);
    if (sa.sa_handler == SIG_DFL) {
      sa.sa_handler = SIG_IGN;
      sigaction(SIGPIPE, &sa, nullptr);
    }
    return 0;
  }();
  (void)dummy;
}

}  // namespace

struct ExternalClassifier::Process {
  pid_t pid = -1;
  int to_child = -1;    // we write requests here
  int from_child = -1;  // we read responses here
  std::string buffer;   // unconsumed bytes from the child

  ~Process() { shutdown(); }

  void spawn(const std::string& command) {
    ignore_sigpipe_once();

    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (pipe(in_pipe) != 0) throw TransportError("classifier bridge: pipe() failed");
    if (pipe(out_pipe) != 0) {
      close(in_pipe[0]);
      close(in_pipe[1]);
      throw TransportError("classifier bridge: pipe() failed");
    }

    pid = fork();
    if (pid < 0) {
      for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
      throw TransportError("classifier bridge: fork() failed");
    }
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child = in_pipe[1];
    from_child = out_pipe[0];
  }

  void write_line(const std::string& line) {
    std::size_t off = 0;
    while (off < line.size()) {
      const ssize_t n = ::write(to_child, line.data() + off, line.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("classifier bridge: write failed: ") +
                             std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    for (;;) {
      const auto nl = buffer.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        return line;
      }
      char chunk[4096];
      const ssize_t n = ::read(from_child, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("classifier bridge: read failed: ") +
                             std::strerror(errno));
      }
      if (n == 0) {
        throw TransportError("classifier bridge: subprocess closed its output");
      }
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void shutdown() {
    if (to_child >= 0) {
      close(to_child);
      to_child = -1;
    }
    if (from_child >= 0) {
      close(from_child);
      from_child = -1;
    }
    if (pid > 0) {
      // Give the child a moment to exit on EOF, then insist.
      for (int i = 0; i < 20; ++i) {
        if (waitpid(pid, nullptr, WNOHANG) != 0) {
          pid = -1;
          return;
        }
        usleep(100 * 1000);
      }
      kill(pid, SIGKILL);
      waitpid(pid, nullptr, 0);
      pid = -1;
    }
  }
};

ExternalClassifier::ExternalClassifier(std::string command, std::size_t class_count,
                                       std::size_t series_length)
    : proc_(std::make_unique<Process>()),
      command_(std::move(command)),
      class_count_(class_count),
      length_(series_length) {
  if (class_count_ < 2) {
    throw std::invalid_argument("ExternalClassifier: class_count must be >= 2");
  }
  if (length_ < 2) {
    throw std::invalid_argument("ExternalClassifier: series_length must be >= 2");
  }
  proc_->spawn(command_);
}

ExternalClassifier::~ExternalClassifier() = default;

std::vector<ProbVector> ExternalClassifier::predict_proba(
    const std::vector<TimeSeries>& batch) const {
  if (batch.empty()) return {};
  for (const auto& s : batch) {
    if (s.size() != length_) {
      throw std::invalid_argument("predict_proba: series length " + std::to_string(s.size()) +
                                  " does not match expected length " + std::to_string(length_));
    }
  }

  std::lock_guard<std::mutex> lock(mu_);
  const std::uint64_t id = next_id_++;

  json request;
  request["id"] = id;
  auto& rows = request["series"] = json::array();
  for (const auto& s : batch) rows.push_back(s.values());
  proc_->write_line(request.dump() + "\n");

  const std::string line = proc_->read_line();
  json response;
  try {
    response = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("classifier bridge: response is not JSON: ") + e.what());
  }

  if (!response.is_object() || !response.contains("id") || !response.contains("probs")) {
    throw ProtocolError("classifier bridge: response must be {\"id\", \"probs\"}");
  }
  if (!response["id"].is_number_integer() || response["id"].get<std::uint64_t>() != id) {
    throw ProtocolError("classifier bridge: response id does not match request id " +
                        std::to_string(id));
  }
  const auto& probs = response["probs"];
  if (!probs.is_array() || probs.size() != batch.size()) {
    throw ProtocolError("classifier bridge: expected " + std::to_string(batch.size()) +
                        " probability rows, got " +
                        (probs.is_array() ? std::to_string(probs.size()) : "a non-array"));
  }

  std::vector<ProbVector> out;
  out.reserve(batch.size());
  constexpr double kWireTol = 1e-6;
  for (std::size_t r = 0; r < probs.size(); ++r) {
    const auto& row = probs[r];
    if (!row.is_array() || row.size() != class_count_) {
      throw ProtocolError("classifier bridge: row " + std::to_string(r) + " must have " +
                          std::to_string(class_count_) + " classes");
    }
    ProbVector p(class_count_);
    double sum = 0.0;
    for (std::size_t c = 0; c < class_count_; ++c) {
      if (!row[c].is_number()) {
        throw ProtocolError("classifier bridge: row " + std::to_string(r) +
                            " has a non-numeric entry");
      }
      const double v = row[c].get<double>();
      if (!std::isfinite(v) || v < -kWireTol || v > 1.0 + kWireTol) {
        throw ProtocolError("classifier bridge: row " + std::to_string(r) +
                            " has probability out of range");
      }
      p[c] = v;
      sum += v;
    }
    if (std::abs(sum - 1.0) > kWireTol) {
      throw ProtocolError("classifier bridge: row " + std::to_string(r) + " sums to " +
                          std::to_string(sum) + ", not 1");
    }
    // Valid at wire tolerance; tighten to the internal invariant.
    for (double& v : p) v = std::min(std::max(v, 0.0), 1.0);
    double clamped_sum = 0.0;
    for (double v : p) clamped_sum += v;
    for (double& v : p) v /= clamped_sum;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace tscf
