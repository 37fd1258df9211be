#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "dtnav/twin_protocol.hpp"

namespace dtnav {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConnectionClosed : public TransportError {
 public:
  using TransportError::TransportError;
};

class TransportTimeout : public TransportError {
 public:
  using TransportError::TransportError;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 0;

  /// Parses "host:port" or a bare port.
  static Endpoint parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

/// Owns a file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release();

 private:
  int fd_ = -1;
};

/// Newline-delimited message stream over a connected socket.
class LineChannel {
 public:
  using Tap = std::function<void(bool outgoing, const std::string& line)>;

  explicit LineChannel(Socket socket) : socket_(std::move(socket)) {}

  void send(const TwinMessage& message);
  void send_line(const std::string& line);

  /// Throws ConnectionClosed on EOF, TransportTimeout when nothing arrives in time,
  /// ProtocolError for malformed or oversized frames.
  TwinMessage receive(std::chrono::milliseconds timeout);
  std::string receive_line(std::chrono::milliseconds timeout);

  void set_tap(Tap tap) { tap_ = std::move(tap); }
  void close() { socket_ = Socket(); }

 private:
  Socket socket_;
  std::string pending_;
  Tap tap_;
};

class Listener {
 public:
  /// Binds and listens. Port 0 picks an ephemeral port.
  explicit Listener(const Endpoint& endpoint);
  int port() const { return port_; }
  LineChannel accept(std::chrono::milliseconds timeout);

 private:
  Socket socket_;
  int port_ = 0;
};

/// Connects, retrying until `timeout` elapses.
LineChannel connect_to(const Endpoint& endpoint, std::chrono::milliseconds timeout);

}  // namespace dtnav
