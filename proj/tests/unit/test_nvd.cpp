#include <doctest.h>

#include "corpus.hpp"
#include "pcve/common/error.hpp"
#include "pcve/nvd/cve_record.hpp"

using namespace pcve;
using namespace pcve::nvd;
namespace fs = std::filesystem;

namespace {

Json v2_entry(const std::string& id, const std::string& published, std::vector<std::string> urls) {
  Json refs = Json::array();
  for (const auto& u : urls) refs.push_back({{"url", u}, {"source", "x"}});
  return Json{{"cve",
               {{"id", id},
                {"published", published},
                {"descriptions", Json::array({Json{{"lang", "es"}, {"value", "otro"}}, Json{{"lang", "en"}, {"value", "english text"}}})},
                {"weaknesses", Json::array({Json{{"description", Json::array({Json{{"lang", "en"}, {"value", "CWE-787"}},
                                                                              Json{{"lang", "en"}, {"value", "NVD-CWE-Other"}}})}}})},
                {"references", refs}}}};
}

}  // namespace

TEST_CASE("classify_reference recognizes github artifact urls") {
  auto c = classify_reference("https://github.com/Owner/Repo/commit/ABCDEF1234567?diff=split#x");
  CHECK(c.kind == ReferenceKind::Commit);
  CHECK(c.repo == "Owner/Repo");
  CHECK(c.locator == "abcdef1234567");

  auto i = classify_reference("https://github.com/o/r/issues/0042");
  CHECK(i.kind == ReferenceKind::Issue);
  CHECK(i.locator == "42");

  auto p = classify_reference("http://www.github.com/o/r.git/pull/7/files");
  CHECK(p.kind == ReferenceKind::Pull);
  CHECK(p.repo == "o/r");
  CHECK(p.locator == "7");

  CHECK(classify_reference("https://github.com/o/r/commits/1234567").kind == ReferenceKind::Commit);
  CHECK(classify_reference("https://github.com/o/r/security/advisories/GHSA-x").kind == ReferenceKind::OtherGitHub);
  CHECK(classify_reference("https://github.com/o/r/commit/xyz").kind == ReferenceKind::OtherGitHub);
  CHECK(classify_reference("https://github.com/o/r/commit/123456").kind == ReferenceKind::OtherGitHub);  // too short
  CHECK(classify_reference("https://github.com/o/r/issues/0").kind == ReferenceKind::OtherGitHub);
  CHECK(classify_reference("https://raw.githubusercontent.com/o/r/main/x").kind == ReferenceKind::OtherGitHub);
  CHECK(classify_reference("https://gitlab.com/o/r/commit/abcdef1").kind == ReferenceKind::NonGitHub);
  CHECK(classify_reference("https://notgithub.com/o/r/issues/1").kind == ReferenceKind::NonGitHub);
  CHECK(classify_reference("ftp://github.com/o/r/issues/1").kind == ReferenceKind::NonGitHub);
  CHECK(classify_reference("").kind == ReferenceKind::NonGitHub);
  CHECK(classify_reference("  https://github.com/o/r/issues/3  ").kind == ReferenceKind::Issue);
}

TEST_CASE("parse_cve reads the 2.0 layout") {
  auto r = parse_cve(v2_entry("CVE-2019-1010308", "2019-07-15T13:15:00.000", {"https://github.com/o/r/issues/5", "https://example.org"}));
  CHECK(r.cve_id == "CVE-2019-1010308");
  CHECK(r.disclosed_at == Timestamp::parse("2019-07-15T13:15:00Z"));
  CHECK(r.description == "english text");
  CHECK(r.cwe_ids == std::vector<std::string>{"CWE-787"});
  REQUIRE(r.references.size() == 2);
  CHECK(r.references[0].kind == ReferenceKind::Issue);
  CHECK(has_github_artifact_reference(r));

  // bare cve object
  CHECK(parse_cve(v2_entry("CVE-2020-0001", "2020-01-01", {}).at("cve")).cve_id == "CVE-2020-0001");
}

TEST_CASE("parse_cve reads the legacy 1.1 layout") {
  Json item{{"cve",
             {{"CVE_data_meta", {{"ID", "CVE-2017-12345"}}},
              {"problemtype", {{"problemtype_data", Json::array({Json{{"description", Json::array({Json{{"value", "CWE-79"}}})}}})}}},
              {"description", {{"description_data", Json::array({Json{{"lang", "en"}, {"value", "xss"}}})}}},
              {"references", {{"reference_data", Json::array({Json{{"url", "https://github.com/o/r/pull/9"}}})}}}}},
            {"publishedDate", "2017-08-01T14:29Z"}};
  auto r = parse_cve(item);
  CHECK(r.cve_id == "CVE-2017-12345");
  CHECK(r.cwe_ids == std::vector<std::string>{"CWE-79"});
  CHECK(r.description == "xss");
  CHECK(r.references.at(0).kind == ReferenceKind::Pull);
  CHECK(r.disclosed_at == Timestamp::parse("2017-08-01T14:29:00Z"));
}

TEST_CASE("parse_cve rejects malformed entries with a kind") {
  auto kind_of = [](const Json& j) {
    try {
      parse_cve(j);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  auto missing_published = v2_entry("CVE-2019-0001", "x", {});
  missing_published["cve"].erase("published");
  CHECK(kind_of(missing_published) == ErrorKind::MissingField);
  CHECK(kind_of(v2_entry("CVE-19-1", "2019-01-01", {})) == ErrorKind::MalformedRecord);
  CHECK(kind_of(v2_entry("CVE-2019-0001", "yesterday", {})) == ErrorKind::MalformedRecord);
  CHECK(kind_of(Json::array()) == ErrorKind::MalformedRecord);
}

TEST_CASE("filter keeps artifact-referenced records in order") {
  std::vector<CveRecord> rs{parse_cve(v2_entry("CVE-2019-0003", "2019-01-01", {"https://github.com/o/r/commit/abcdef1"})),
                            parse_cve(v2_entry("CVE-2019-0001", "2019-01-01", {"https://github.com/o/r"})),
                            parse_cve(v2_entry("CVE-2019-0002", "2019-01-01", {"https://github.com/o/r/issues/1"}))};
  auto kept = filter_github_referenced(rs);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].cve_id == "CVE-2019-0003");
  CHECK(kept[1].cve_id == "CVE-2019-0002");
}

TEST_CASE("feed loading: directory order, lenient mode, json round trip") {
  auto dir = testing::scratch_dir("feed");
  Json a{{"vulnerabilities", Json::array({v2_entry("CVE-2019-0002", "2019-01-01", {})})}};
  Json b{{"vulnerabilities", Json::array({v2_entry("CVE-2019-0001", "2019-01-01", {}), v2_entry("bogus", "2019-01-01", {})})}};
  write_file_atomic(dir / "b.json", b.dump());
  write_file_atomic(dir / "a.json", a.dump());
  write_file_atomic(dir / "ignored.txt", "x");
  CHECK_THROWS_AS(load_feed(dir), Error);
  auto lenient = load_feed_lenient(dir);
  REQUIRE(lenient.records.size() == 2);
  CHECK(lenient.records[0].cve_id == "CVE-2019-0002");
  CHECK(lenient.rejected.size() == 1);
  CHECK(lenient.rejected[0].rfind("b.json[1]", 0) == 0);
  CHECK_THROWS_AS(load_feed(dir / "nope.json"), Error);

  auto r = parse_cve(v2_entry("CVE-2019-0009", "2019-03-04T05:06:07", {"https://github.com/o/r/commit/ABCDEF1", "https://x.org"}));
  CHECK(cve_record_from_json(to_json(r)) == r);
  fs::remove_all(dir);
}
