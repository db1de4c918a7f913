#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <thread>
#include <unistd.h>

#include "zkmedian/board.hpp"
#include "zkmedian/board_net.hpp"
#include "zkmedian/errors.hpp"

using namespace zkmedian;

namespace {

struct TempPath {
  std::string path;
  explicit TempPath(const std::string& name) {
    path = std::string("/tmp/zkmedian-test-") + name + "-" + std::to_string(::getpid());
    std::remove(path.c_str());
  }
  ~TempPath() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("memory board appends in order and reads back") {
  MemoryBoard b;
  CHECK(b.size() == 0);
  CHECK(b.append("alice", "commitment", "{\"com\":\"1\"}") == 0);
  CHECK(b.append("bob", "commitment", "{\"com\":\"2\"}") == 1);
  CHECK(b.size() == 2);
  BoardEntry e = b.read(1);
  CHECK(e.index == 1);
  CHECK(e.owner == "bob");
  CHECK(e.kind == "commitment");
  CHECK_THROWS_AS(b.read(2), Error);
  CHECK(b.list().size() == 2);
}

TEST_CASE("file board persists across instances") {
  TempPath tmp("fileboard");
  {
    FileBoard b(tmp.path);
    b.append("alice", "commitment", "{\"com\":\"1\"}");
    b.append("analyst", "result", "{\"med\":\"3\"}");
  }
  FileBoard reopened(tmp.path);
  CHECK(reopened.size() == 2);
  CHECK(reopened.read(0).owner == "alice");
  CHECK(reopened.read(1).kind == "result");
}

TEST_CASE("file board sees appends made by another handle") {
  TempPath tmp("shared");
  FileBoard writer(tmp.path);
  FileBoard reader(tmp.path);
  CHECK(reader.size() == 0);
  writer.append("a", "commitment", "{}");
  CHECK(reader.size() == 1); // reloads on read
  writer.append("b", "commitment", "{}");
  CHECK(reader.read(1).owner == "b");
}

TEST_CASE("file board rejects a corrupted line") {
  TempPath tmp("corrupt");
  {
    FileBoard b(tmp.path);
    b.append("a", "commitment", "{}");
  }
  std::ofstream out(tmp.path, std::ios::app);
  out << "this is not json\n";
  out.close();
  // The constructor already loads, so it is what throws.
  CHECK_THROWS_AS(FileBoard{tmp.path}, Error);
}

TEST_CASE("concurrent appends never drop or duplicate an index") {
  MemoryBoard b;
  constexpr int kThreads = 8, kEach = 50;
  std::vector<std::thread> ts;
  ts.reserve(kThreads);
  for (int t = 0; t < kThreads; ++t)
    ts.emplace_back([&b, t] {
      for (int i = 0; i < kEach; ++i)
        b.append("t" + std::to_string(t), "commitment", "{}");
    });
  for (auto& t : ts) t.join();
  CHECK(b.size() == kThreads * kEach);
  for (uint64_t i = 0; i < b.size(); ++i) CHECK(b.read(i).index == i);
}

TEST_CASE("entry json round trip") {
  BoardEntry e;
  e.index = 4;
  e.owner = "provider-4";
  e.kind = "commitment";
  e.payload = "{\"com\":\"99\"}";
  BoardEntry back = entry_from_json(entry_to_json(e));
  CHECK(back.index == e.index);
  CHECK(back.owner == e.owner);
  CHECK(back.kind == e.kind);
  CHECK(back.payload == e.payload);
  CHECK_THROWS_AS(entry_from_json("nonsense"), Error);
}

TEST_CASE("board uris parse or reject") {
  CHECK(open_board("memory") != nullptr);
  TempPath tmp("uri");
  CHECK(open_board("file:" + tmp.path) != nullptr);
  CHECK_THROWS_AS(open_board("carrier-pigeon"), Error);
  CHECK_THROWS_AS(open_board("tcp:localhost"), Error);
  CHECK_THROWS_AS(open_board("tcp:localhost:notaport"), Error);
  CHECK_THROWS_AS(open_board("tcp:localhost:99999"), Error);
}

TEST_CASE("tcp board round trips through a live server") {
  MemoryBoard backing;
  BoardServer server(backing, 0);
  REQUIRE(server.port() != 0);
  std::thread runner([&server] { server.run(); });

  {
    TcpBoard client("127.0.0.1", server.port());
    CHECK(client.size() == 0);
    CHECK(client.append("alice", "commitment", "{\"com\":\"5\"}") == 0);
    CHECK(client.append("analyst", "result", "{\"med\":\"1\"}") == 1);
    CHECK(client.size() == 2);
    BoardEntry e = client.read(0);
    CHECK(e.owner == "alice");
    CHECK(e.payload == "{\"com\":\"5\"}");
    CHECK_THROWS_AS(client.read(9), Error);

    auto via_uri = open_board("tcp:127.0.0.1:" + std::to_string(server.port()));
    CHECK(via_uri->size() == 2);
  }

  server.stop();
  runner.join();
  CHECK(backing.size() == 2); // server wrote through to the backing board
}

TEST_CASE("tcp board reports transport errors on a dead port") {
  TcpBoard client("127.0.0.1", 1); // nothing listens on port 1
  CHECK_THROWS_AS(client.size(), Error);
}
