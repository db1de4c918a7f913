#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace zkmedian {

// Append-only bulletin board. Entries are immutable once posted; index is
// assigned by the board in arrival order.
struct BoardEntry {
  uint64_t index = 0;
  std::string owner;
  std::string kind; // "commitment", "result", "proof"
  std::string payload;
};

class Board {
public:
  virtual ~Board() = default;
  virtual uint64_t append(const std::string& owner, const std::string& kind,
                          const std::string& payload) = 0;
  virtual BoardEntry read(uint64_t index) const = 0;
  virtual uint64_t size() const = 0;
  std::vector<BoardEntry> list() const;
};

class MemoryBoard final : public Board {
public:
  uint64_t append(const std::string& owner, const std::string& kind,
                  const std::string& payload) override;
  BoardEntry read(uint64_t index) const override;
  uint64_t size() const override;

private:
  mutable std::mutex mu_;
  std::vector<BoardEntry> entries_;
};

// One JSON object per line, fsynced on every append so a crashed writer never
// leaves a torn entry visible to later readers.
class FileBoard final : public Board {
public:
  explicit FileBoard(std::string path);
  uint64_t append(const std::string& owner, const std::string& kind,
                  const std::string& payload) override;
  BoardEntry read(uint64_t index) const override;
  uint64_t size() const override;

private:
  void reload() const;
  std::string path_;
  mutable std::mutex mu_;
  mutable std::vector<BoardEntry> entries_;
};

std::string entry_to_json(const BoardEntry& e);
BoardEntry entry_from_json(const std::string& text);

// Board URIs: "memory", "file:PATH", "tcp:HOST:PORT".
std::unique_ptr<Board> open_board(const std::string& uri);

} // namespace zkmedian
