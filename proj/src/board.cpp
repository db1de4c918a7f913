#include "zkmedian/board.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "zkmedian/board_net.hpp"
#include "zkmedian/errors.hpp"

namespace zkmedian {

using json = nlohmann::ordered_json;

std::vector<BoardEntry> Board::list() const {
  std::vector<BoardEntry> out;
  uint64_t n = size();
  out.reserve(n);
  for (uint64_t i = 0; i < n; ++i) out.push_back(read(i));
  return out;
}

uint64_t MemoryBoard::append(const std::string& owner, const std::string& kind,
                             const std::string& payload) {
  std::lock_guard<std::mutex> lock(mu_);
  uint64_t idx = entries_.size();
  entries_.push_back(BoardEntry{idx, owner, kind, payload});
  return idx;
}

BoardEntry MemoryBoard::read(uint64_t index) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (index >= entries_.size()) fail(errc::parameter, "board index out of range");
  return entries_[index];
}

uint64_t MemoryBoard::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::string entry_to_json(const BoardEntry& e) {
  json j;
  j["index"] = e.index;
  j["owner"] = e.owner;
  j["kind"] = e.kind;
  j["payload"] = e.payload;
  return j.dump();
}

BoardEntry entry_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(errc::serialization, "malformed board entry");
  BoardEntry e;
  if (!j.contains("index") || !j.contains("owner") || !j.contains("kind") ||
      !j.contains("payload"))
    fail(errc::serialization, "board entry missing a field");
  e.index = j["index"].get<uint64_t>();
  e.owner = j["owner"].get<std::string>();
  e.kind = j["kind"].get<std::string>();
  e.payload = j["payload"].get<std::string>();
  return e;
}

FileBoard::FileBoard(std::string path) : path_(std::move(path)) { reload(); }

void FileBoard::reload() const {
  entries_.clear();
  std::ifstream in(path_);
  if (!in.is_open()) return; // absent file means an empty board
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    BoardEntry e = entry_from_json(line);
    if (e.index != entries_.size())
      fail(errc::serialization, "board file has out-of-order entry indices");
    entries_.push_back(std::move(e));
  }
}

uint64_t FileBoard::append(const std::string& owner, const std::string& kind,
                           const std::string& payload) {
  std::lock_guard<std::mutex> lock(mu_);
  reload(); // pick up entries other processes appended
  uint64_t idx = entries_.size();
  BoardEntry e{idx, owner, kind, payload};
  std::string line = entry_to_json(e) + "\n";
  int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) fail(errc::transport, "cannot open board file " + path_);
  ssize_t wrote = ::write(fd, line.data(), line.size());
  bool ok = wrote == ssize_t(line.size()) && ::fsync(fd) == 0;
  ::close(fd);
  if (!ok) fail(errc::transport, "short write to board file " + path_);
  entries_.push_back(std::move(e));
  return idx;
}

BoardEntry FileBoard::read(uint64_t index) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (index >= entries_.size()) reload();
  if (index >= entries_.size()) fail(errc::parameter, "board index out of range");
  return entries_[index];
}

uint64_t FileBoard::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  reload();
  return entries_.size();
}

std::unique_ptr<Board> open_board(const std::string& uri) {
  if (uri == "memory") return std::make_unique<MemoryBoard>();
  if (uri.rfind("file:", 0) == 0) return std::make_unique<FileBoard>(uri.substr(5));
  if (uri.rfind("tcp:", 0) == 0) {
    std::string rest = uri.substr(4);
    size_t colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size())
      fail(errc::parameter, "tcp board uri must be tcp:HOST:PORT");
    std::string host = rest.substr(0, colon);
    int port = 0;
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (...) {
      fail(errc::parameter, "bad port in board uri");
    }
    if (port <= 0 || port > 65535) fail(errc::parameter, "bad port in board uri");
    return std::make_unique<TcpBoard>(host, uint16_t(port));
  }
  fail(errc::parameter, "unknown board uri '" + uri + "' (memory | file:PATH | tcp:HOST:PORT)");
}

} // namespace zkmedian
