#include "zkmedian/board_net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include <nlohmann/json.hpp>

#include "zkmedian/errors.hpp"

namespace zkmedian {

using json = nlohmann::ordered_json;

namespace {

void send_all(int fd, const std::string& data) {
  size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n <= 0) fail(errc::transport, "send failed");
    off += size_t(n);
  }
}

std::string recv_line(int fd) {
  std::string line;
  char ch;
  while (true) {
    ssize_t n = ::recv(fd, &ch, 1, 0);
    if (n == 0) fail(errc::transport, "connection closed before response");
    if (n < 0) fail(errc::transport, "recv failed");
    if (ch == '\n') return line;
    line.push_back(ch);
    if (line.size() > (64u << 20)) fail(errc::transport, "oversized board message");
  }
}

int connect_to(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  std::string port_str = std::to_string(port);
  if (::getaddrinfo(host.c_str(), port_str.c_str(), &hints, &res) != 0 || !res)
    fail(errc::transport, "cannot resolve board host " + host);
  int fd = -1;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) fail(errc::transport, "cannot connect to board at " + host + ":" + port_str);
  return fd;
}

} // namespace

TcpBoard::TcpBoard(std::string host, uint16_t port) : host_(std::move(host)), port_(port) {}

std::string TcpBoard::request(const std::string& line) const {
  int fd = connect_to(host_, port_);
  try {
    send_all(fd, line + "\n");
    std::string reply = recv_line(fd);
    ::close(fd);
    return reply;
  } catch (...) {
    ::close(fd);
    throw;
  }
}

uint64_t TcpBoard::append(const std::string& owner, const std::string& kind,
                          const std::string& payload) {
  json req;
  req["op"] = "append";
  req["owner"] = owner;
  req["kind"] = kind;
  req["payload"] = payload;
  json rsp = json::parse(request(req.dump()), nullptr, false);
  if (rsp.is_discarded() || !rsp.value("ok", false))
    fail(errc::transport, "board append rejected: " + (rsp.is_discarded() ? std::string("bad reply") : rsp.value("error", std::string("unknown"))));
  return rsp["index"].get<uint64_t>();
}

BoardEntry TcpBoard::read(uint64_t index) const {
  json req;
  req["op"] = "read";
  req["index"] = index;
  json rsp = json::parse(request(req.dump()), nullptr, false);
  if (rsp.is_discarded() || !rsp.value("ok", false))
    fail(errc::transport, "board read failed");
  return entry_from_json(rsp["entry"].dump());
}

uint64_t TcpBoard::size() const {
  json req;
  req["op"] = "list";
  json rsp = json::parse(request(req.dump()), nullptr, false);
  if (rsp.is_discarded() || !rsp.value("ok", false))
    fail(errc::transport, "board list failed");
  return rsp["entries"].size();
}

BoardServer::BoardServer(Board& backing, uint16_t port) : backing_(backing) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) fail(errc::transport, "cannot create listen socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(listen_fd_);
    fail(errc::transport, "cannot bind board port " + std::to_string(port));
  }
  if (::listen(listen_fd_, 64) != 0) {
    ::close(listen_fd_);
    fail(errc::transport, "cannot listen on board port");
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

BoardServer::~BoardServer() {
  stop();
  for (auto& t : workers_)
    if (t.joinable()) t.join();
}

void BoardServer::stop() {
  bool was = stopping_.exchange(true);
  if (!was && listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
}

void BoardServer::run() {
  while (!stopping_.load()) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_.load()) break;
      continue;
    }
    workers_.emplace_back([this, fd] { serve_client(fd); });
  }
}

void BoardServer::serve_client(int fd) {
  // A client may pipeline several requests on one connection; serve until EOF.
  std::string buf;
  char chunk[4096];
  while (true) {
    size_t nl = buf.find('\n');
    if (nl == std::string::npos) {
      ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n <= 0) break;
      buf.append(chunk, size_t(n));
      continue;
    }
    std::string line = buf.substr(0, nl);
    buf.erase(0, nl + 1);
    json rsp;
    try {
      json req = json::parse(line, nullptr, false);
      if (req.is_discarded() || !req.is_object()) {
        rsp["ok"] = false;
        rsp["error"] = "malformed request";
      } else {
        std::string op = req.value("op", std::string());
        if (op == "append") {
          uint64_t idx = backing_.append(req.value("owner", std::string()),
                                         req.value("kind", std::string()),
                                         req.value("payload", std::string()));
          rsp["ok"] = true;
          rsp["index"] = idx;
        } else if (op == "read") {
          BoardEntry e = backing_.read(req.value("index", uint64_t(0)));
          rsp["ok"] = true;
          rsp["entry"] = json::parse(entry_to_json(e));
        } else if (op == "list") {
          json arr = json::array();
          for (const auto& e : backing_.list()) arr.push_back(json::parse(entry_to_json(e)));
          rsp["ok"] = true;
          rsp["entries"] = std::move(arr);
        } else {
          rsp["ok"] = false;
          rsp["error"] = "unknown op '" + op + "'";
        }
      }
    } catch (const std::exception& e) {
      rsp = json();
      rsp["ok"] = false;
      rsp["error"] = e.what();
    }
    try {
      send_all(fd, rsp.dump() + "\n");
    } catch (...) {
      break;
    }
  }
  ::close(fd);
}

} // namespace zkmedian
