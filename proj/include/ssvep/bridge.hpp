#pragma once

#include <string>

#include "ssvep/ensemble.hpp"
#include "ssvep/experiment.hpp"

namespace ssvep {

// Line-oriented TCP bridge carrying classification results to a rendering
// client. One frame per line, UTF-8:
//   CMD <label_id> <name> <winning_tally>   one per classified trial
//   ERR <code> <detail>                     malformed trial, stream continues
//   END                                     source exhausted, connection closes
// One client is served at a time; if it disconnects mid-stream the server
// returns to accept and redelivers the pending frame to the next client.

struct BridgeStats {
  int frames_sent = 0;  // CMD + ERR + END
  int commands_sent = 0;
  int errors_sent = 0;
  int client_sessions = 0;
  OnlineReport online;
};

class CommandBridge {
 public:
  // Binds and listens on host:port; port 0 picks an ephemeral port.
  CommandBridge(const std::string& host, int port);
  ~CommandBridge();
  CommandBridge(const CommandBridge&) = delete;
  CommandBridge& operator=(const CommandBridge&) = delete;

  int port() const { return port_; }

  // Classifies every trial from the source and streams frames to clients.
  // Blocks until the source is exhausted and END has been delivered.
  BridgeStats serve(const EnsembleModel& model, TrialSource source);

 private:
  int listen_fd_ = -1;
  int port_ = 0;
};

std::string format_cmd_frame(const OnlineRecord& record);
std::string format_err_frame(const OnlineRecord& record);

// Convenience wrapper: bind, serve one full stream, close.
BridgeStats serve_commands(const std::string& host, int port, const EnsembleModel& model,
                           TrialSource source);

}  // namespace ssvep
