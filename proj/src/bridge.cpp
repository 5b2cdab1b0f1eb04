#include "ssvep/bridge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace ssvep {

namespace {

std::string format_tally(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Full-buffer send; returns false on any failure (peer gone, etc.).
bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n =
        ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

std::string format_cmd_frame(const OnlineRecord& record) {
  std::string tally = "0";
  if (record.predicted >= 0 &&
      record.predicted < static_cast<int>(record.tally.size())) {
    tally = format_tally(record.tally[static_cast<std::size_t>(record.predicted)]);
  }
  return "CMD " + std::to_string(record.predicted) + " " + record.command_name + " " +
         tally + "\n";
}

std::string format_err_frame(const OnlineRecord& record) {
  return "ERR malformed_trial " + record.error_detail + "\n";
}

CommandBridge::CommandBridge(const std::string& host, int port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("bridge: socket() failed");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("bridge: bad host address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string detail = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("bridge: bind to " + host + ":" + std::to_string(port) +
                             " failed: " + detail);
  }
  if (::listen(listen_fd_, 1) != 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("bridge: listen() failed");
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

CommandBridge::~CommandBridge() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

BridgeStats CommandBridge::serve(const EnsembleModel& model, TrialSource source) {
  BridgeStats stats;
  int client_fd = -1;
  std::string pending;  // frame not yet delivered to any client

  const auto deliver = [&](const std::string& frame) {
    pending = frame;
    while (true) {
      if (client_fd < 0) {
        client_fd = ::accept(listen_fd_, nullptr, nullptr);
        if (client_fd < 0) throw std::runtime_error("bridge: accept() failed");
        ++stats.client_sessions;
      }
      if (send_all(client_fd, pending)) {
        pending.clear();
        ++stats.frames_sent;
        return;
      }
      // Client went away; return to accept and redeliver.
      ::close(client_fd);
      client_fd = -1;
    }
  };

  stats.online = run_online_session(model, std::move(source), [&](const OnlineRecord& r) {
    if (r.error) {
      deliver(format_err_frame(r));
      ++stats.errors_sent;
    } else {
      deliver(format_cmd_frame(r));
      ++stats.commands_sent;
    }
  });

  deliver("END\n");
  if (client_fd >= 0) ::close(client_fd);
  return stats;
}

BridgeStats serve_commands(const std::string& host, int port, const EnsembleModel& model,
                           TrialSource source) {
  CommandBridge bridge(host, port);
  return bridge.serve(model, std::move(source));
}

}  // namespace ssvep
