#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "zkmedian/board.hpp"

namespace zkmedian {

// Client for a board served over TCP. Each operation is one newline-delimited
// JSON request and one newline-delimited JSON response on a fresh connection.
class TcpBoard final : public Board {
public:
  TcpBoard(std::string host, uint16_t port);
  uint64_t append(const std::string& owner, const std::string& kind,
                  const std::string& payload) override;
  BoardEntry read(uint64_t index) const override;
  uint64_t size() const override;

private:
  std::string request(const std::string& line) const;
  std::string host_;
  uint16_t port_;
};

// Serves a backing board over TCP, one thread per connection. Appends are
// serialized by the backing board itself.
class BoardServer {
public:
  // Binds immediately; port 0 picks an ephemeral port, readable via port().
  BoardServer(Board& backing, uint16_t port);
  ~BoardServer();
  uint16_t port() const { return port_; }
  void run();  // blocks until stop()
  void stop();

private:
  void serve_client(int fd);
  Board& backing_;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::vector<std::thread> workers_;
};

} // namespace zkmedian
