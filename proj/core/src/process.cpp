// Copyright 2026 The bcverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>

namespace bcv::detail
{

namespace
{

class Fd
{
public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd &) = delete;
  Fd & operator=(const Fd &) = delete;
  Fd(Fd && other) noexcept : fd_(other.release()) {}
  Fd & operator=(Fd && other) noexcept
  {
    if (this != &other) {
      reset(other.release());
    }
    return *this;
  }
  ~Fd() { reset(); }

  [[nodiscard]] int get() const { return fd_; }
  int release()
  {
    const int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void reset(int fd = -1)
  {
    if (fd_ >= 0) {
      ::close(fd_);
    }
    fd_ = fd;
  }

private:
  int fd_{-1};
};

bool make_pipe(Fd & read_end, Fd & write_end)
{
  std::array<int, 2> fds{};
  if (::pipe2(fds.data(), O_CLOEXEC) != 0) {
    return false;
  }
  read_end.reset(fds[0]);
  write_end.reset(fds[1]);
  return true;
}

void set_nonblocking(int fd)
{
  const int flags = ::fcntl(fd, F_GETFL);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

int decode_wait_status(int status)
{
  if (WIFEXITED(status)) {
    return WEXITSTATUS(status);
  }
  if (WIFSIGNALED(status)) {
    return 128 + WTERMSIG(status);
  }
  return -1;
}

}  // namespace

ProcessResult run_process(
  const std::vector<std::string> & argv, const std::string & input,
  std::chrono::milliseconds timeout)
{
  ProcessResult result;
  if (argv.empty()) {
    result.status = ProcessResult::Status::LaunchFailed;
    result.detail = "empty command line";
    return result;
  }

  Fd in_r, in_w, out_r, out_w, err_r, err_w, exec_r, exec_w;
  if (
    !make_pipe(in_r, in_w) || !make_pipe(out_r, out_w) || !make_pipe(err_r, err_w) ||
    !make_pipe(exec_r, exec_w)) {
    result.status = ProcessResult::Status::LaunchFailed;
    result.detail = std::string("pipe: ") + std::strerror(errno);
    return result;
  }

  std::vector<char *> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto & arg : argv) {
    cargv.push_back(const_cast<char *>(arg.c_str()));
  }
  cargv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) {
    result.status = ProcessResult::Status::LaunchFailed;
    result.detail = std::string("fork: ") + std::strerror(errno);
    return result;
  }
  if (pid == 0) {
    ::dup2(in_r.get(), STDIN_FILENO);
    ::dup2(out_w.get(), STDOUT_FILENO);
    ::dup2(err_w.get(), STDERR_FILENO);
    ::execvp(cargv[0], cargv.data());
    // exec_w is close-on-exec: reaching here means exec failed, report errno.
    const int err = errno;
    [[maybe_unused]] const auto n = ::write(exec_w.get(), &err, sizeof(err));
    ::_exit(127);
  }

  in_r.reset();
  out_w.reset();
  err_w.reset();
  exec_w.reset();

  int exec_errno = 0;
  ssize_t got = 0;
  do {
    got = ::read(exec_r.get(), &exec_errno, sizeof(exec_errno));
  } while (got < 0 && errno == EINTR);
  if (got == static_cast<ssize_t>(sizeof(exec_errno))) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    result.status = ProcessResult::Status::LaunchFailed;
    result.detail = "cannot execute '" + argv[0] + "': " + std::strerror(exec_errno);
    return result;
  }

  // A solver that exits early must not kill us with SIGPIPE.
  struct sigaction ignore{};
  struct sigaction previous{};
  ignore.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ignore, &previous);

  set_nonblocking(in_w.get());
  set_nonblocking(out_r.get());
  set_nonblocking(err_r.get());

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t written = 0;
  if (input.empty()) {
    in_w.reset();
  }
  bool timed_out = false;
  std::array<char, 4096> buf{};

  while (out_r.get() >= 0 || err_r.get() >= 0) {
    std::array<pollfd, 3> fds{};
    nfds_t count = 0;
    int in_idx = -1, out_idx = -1, err_idx = -1;
    if (in_w.get() >= 0) {
      in_idx = static_cast<int>(count);
      fds[count++] = {in_w.get(), POLLOUT, 0};
    }
    if (out_r.get() >= 0) {
      out_idx = static_cast<int>(count);
      fds[count++] = {out_r.get(), POLLIN, 0};
    }
    if (err_r.get() >= 0) {
      err_idx = static_cast<int>(count);
      fds[count++] = {err_r.get(), POLLIN, 0};
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      timed_out = true;
      break;
    }
    const int ready = ::poll(fds.data(), count, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) {
        continue;
      }
      break;
    }
    if (ready == 0) {
      timed_out = true;
      break;
    }
    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(in_w.get(), input.data() + written, input.size() - written);
      if (n > 0) {
        written += static_cast<std::size_t>(n);
      }
      if ((n < 0 && errno != EAGAIN) || written == input.size()) {
        in_w.reset();
      }
    }
    auto drain = [&buf](Fd & fd, std::string & sink) {
      const ssize_t n = ::read(fd.get(), buf.data(), buf.size());
      if (n > 0) {
        sink.append(buf.data(), static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EAGAIN) {
        fd.reset();
      }
    };
    if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLERR | POLLHUP))) {
      drain(out_r, result.stdout_text);
    }
    if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLERR | POLLHUP))) {
      drain(err_r, result.stderr_text);
    }
  }

  int status = 0;
  bool reaped = false;
  while (!timed_out) {
    const pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid || (w < 0 && errno != EINTR)) {
      reaped = w == pid;
      break;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      timed_out = true;
      break;
    }
    ::usleep(2000);
  }
  if (timed_out) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
    result.status = ProcessResult::Status::TimedOut;
  } else {
    result.status = ProcessResult::Status::Exited;
    result.exit_code = reaped ? decode_wait_status(status) : -1;
  }
  ::sigaction(SIGPIPE, &previous, nullptr);
  return result;
}

}  // namespace bcv::detail
