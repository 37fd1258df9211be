#include "dtnav/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

namespace dtnav {

namespace {

std::string errno_text(const std::string& what) { return what + ": " + std::strerror(errno); }

sockaddr_in resolve(const Endpoint& endpoint) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(endpoint.port));
  if (inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(endpoint.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw TransportError("cannot resolve host '" + endpoint.host + "'");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return addr;
}

bool wait_readable(int fd, std::chrono::milliseconds timeout) {
  pollfd p{fd, POLLIN, 0};
  for (;;) {
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw TransportError(errno_text("poll"));
    return rc > 0;
  }
}

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  Endpoint ep;
  const auto colon = text.rfind(':');
  std::string port_text = text;
  if (colon != std::string::npos) {
    ep.host = text.substr(0, colon);
    port_text = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    ep.port = std::stoi(port_text, &used);
    if (used != port_text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ValidationError("invalid endpoint '" + text + "'");
  }
  if (ep.port < 0 || ep.port > 65535 || ep.host.empty()) throw ValidationError("invalid endpoint '" + text + "'");
  return ep;
}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.release();
  }
  return *this;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

int Socket::release() {
  const int fd = fd_;
  fd_ = -1;
  return fd;
}

void LineChannel::send(const TwinMessage& message) { send_line(encode_message(message)); }

void LineChannel::send_line(const std::string& line) {
  if (!socket_.valid()) throw ConnectionClosed("channel closed");
  if (tap_) tap_(true, line);
  std::string frame = line + '\n';
  std::size_t sent = 0;
  while (sent < frame.size()) {
    const ssize_t n = ::send(socket_.fd(), frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) {
      if (errno == EPIPE || errno == ECONNRESET) throw ConnectionClosed("peer closed the connection");
      throw TransportError(errno_text("send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string LineChannel::receive_line(std::chrono::milliseconds timeout) {
  if (!socket_.valid()) throw ConnectionClosed("channel closed");
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto nl = pending_.find('\n');
    if (nl != std::string::npos) {
      std::string line = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      if (line.size() > kMaxFrameBytes) throw ProtocolError("protocol error: frame exceeds 1 MiB", line.substr(0, 256));
      if (tap_) tap_(false, line);
      return line;
    }
    if (pending_.size() > kMaxFrameBytes) {
      throw ProtocolError("protocol error: frame exceeds 1 MiB", pending_.substr(0, 256));
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0 || !wait_readable(socket_.fd(), left)) throw TransportTimeout("timed out waiting for peer");
    char buf[65536];
    const ssize_t n = ::recv(socket_.fd(), buf, sizeof(buf), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) {
      if (errno == ECONNRESET) throw ConnectionClosed("connection reset by peer");
      throw TransportError(errno_text("recv"));
    }
    if (n == 0) throw ConnectionClosed("peer closed the connection");
    pending_.append(buf, static_cast<std::size_t>(n));
  }
}

TwinMessage LineChannel::receive(std::chrono::milliseconds timeout) { return decode_message(receive_line(timeout)); }

Listener::Listener(const Endpoint& endpoint) {
  socket_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
  if (!socket_.valid()) throw TransportError(errno_text("socket"));
  const int one = 1;
  ::setsockopt(socket_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = resolve(endpoint);
  if (::bind(socket_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw TransportError(errno_text("bind " + endpoint.str()));
  }
  if (::listen(socket_.fd(), 1) != 0) throw TransportError(errno_text("listen"));
  socklen_t len = sizeof(addr);
  ::getsockname(socket_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

LineChannel Listener::accept(std::chrono::milliseconds timeout) {
  if (!wait_readable(socket_.fd(), timeout)) throw TransportTimeout("no client connected in time");
  const int fd = ::accept(socket_.fd(), nullptr, nullptr);
  if (fd < 0) throw TransportError(errno_text("accept"));
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return LineChannel(Socket(fd));
}

LineChannel connect_to(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  const sockaddr_in addr = resolve(endpoint);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) throw TransportError(errno_text("socket"));
    if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
      const int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return LineChannel(std::move(s));
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      throw TransportError(errno_text("connect " + endpoint.str()));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

}  // namespace dtnav
