#include <doctest.h>

#include <atomic>
#include <fstream>
#include <set>

#include <zlib.h>

#include "corpus.hpp"
#include "pcve/common/error.hpp"
#include "pcve/common/hash.hpp"
#include "pcve/common/io.hpp"
#include "pcve/common/parallel.hpp"
#include "pcve/common/random.hpp"
#include "pcve/common/time.hpp"

using namespace pcve;
namespace fs = std::filesystem;

TEST_CASE("timestamp parsing normalizes zones and fractions") {
  auto a = Timestamp::parse("2019-07-15T13:15:00.123");
  auto b = Timestamp::parse("2019-07-15T15:15:00+02:00");
  auto c = Timestamp::parse("2019-07-15T13:15:00Z");
  CHECK(a == c);
  CHECK(b == c);
  CHECK(c.iso8601() == "2019-07-15T13:15:00Z");
  CHECK(Timestamp::parse("2019-07-15").date_string() == "2019-07-15");
  CHECK(Timestamp::parse("2019-07-15").year() == 2019);
  CHECK_THROWS_AS(Timestamp::parse("15/07/2019"), Error);
  CHECK_THROWS_AS(Timestamp::parse("2019-02-30"), Error);
}

TEST_CASE("floor_days_between floors toward negative infinity") {
  auto t0 = Timestamp::parse("2020-01-01T12:00:00Z");
  CHECK(floor_days_between(t0, Timestamp::parse("2020-01-02T11:59:59Z")) == 0);
  CHECK(floor_days_between(t0, Timestamp::parse("2020-01-02T12:00:00Z")) == 1);
  CHECK(floor_days_between(t0, Timestamp::parse("2020-01-01T11:00:00Z")) == -1);
  CHECK(floor_days_between(Timestamp::from_date(2020, 2, 28), Timestamp::from_date(2020, 3, 1)) == 2);
  CHECK(Timestamp::from_date(2020, 1, 1).plus_days(366) == Timestamp::from_date(2021, 1, 1));
}

TEST_CASE("sha256 matches known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fnv1a64 and derive_seed are stable") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(derive_seed(1, "x") == derive_seed(1, "x"));
  CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
  CHECK(derive_seed(1, "x") != derive_seed(2, "x"));
}

TEST_CASE("rng helpers are reproducible and in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 2000; ++i) {
    auto v = r.index(7);
    CHECK(v < 7);
    seen.insert(v);
    double u = r.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(seen.size() == 7);
  auto picks = r.sample_indices(10, 4);
  CHECK(picks.size() == 4);
  CHECK(std::set<std::size_t>(picks.begin(), picks.end()).size() == 4);
  CHECK(r.sample_indices(3, 10).size() == 3);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_row({"a", "b,c"}) == "a,\"b,c\"\n");
  CHECK(format_fixed(0.8249, 2) == "0.82");
}

TEST_CASE("jsonl round trip and atomic writes") {
  auto dir = testing::scratch_dir("io");
  std::vector<Json> rows{Json{{"b", 1}, {"a", "x"}}, Json{{"k", Json::array({1, 2})}}};
  write_jsonl_atomic(dir / "rows.jsonl", rows);
  auto back = read_jsonl(dir / "rows.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[0] == rows[0]);
  CHECK(to_jsonl_line(back[0]) == R"({"b":1,"a":"x"})");
  int leftovers = 0;
  for (const auto& e : fs::directory_iterator(dir)) leftovers += e.path().string().find(".tmp.") != std::string::npos;
  CHECK(leftovers == 0);
  CHECK_THROWS_AS(read_file(dir / "missing"), Error);

  write_file_atomic(dir / "bad.jsonl", "{\"a\":1}\nnot json\n");
  try {
    read_jsonl(dir / "bad.jsonl");
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedRecord);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("gzip content is inflated transparently") {
  auto dir = testing::scratch_dir("gz");
  std::string payload = "{\"hello\":\"world\"}\n";
  auto path = dir / "f.json.gz";
  gzFile gz = gzopen(path.string().c_str(), "wb");
  REQUIRE(gz != nullptr);
  gzwrite(gz, payload.data(), static_cast<unsigned>(payload.size()));
  gzclose(gz);
  CHECK(read_file(path) == payload);
  fs::remove_all(dir);
}

TEST_CASE("parallel_for writes by index and rethrows") {
  std::vector<int> out(500, 0);
  parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i * 2); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * 2));
  std::atomic<int> ran{0};
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [&](std::size_t i) {
                                 ++ran;
                                 if (i == 10) fail(ErrorKind::Io, "boom");
                               }),
                  Error);
  CHECK(ran.load() >= 1);
}
