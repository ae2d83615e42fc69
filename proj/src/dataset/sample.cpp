#include "pcve/dataset/sample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "pcve/common/error.hpp"
#include "pcve/common/random.hpp"

namespace pcve::dataset {

std::string_view to_string(Label label) { return label == Label::Vuln ? "vuln" : "non_vuln"; }

Label label_from_string(std::string_view text) {
  if (text == "vuln") return Label::Vuln;
  if (text == "non_vuln") return Label::NonVuln;
  fail(ErrorKind::MalformedRecord, "unknown label: " + std::string(text));
}

std::string vuln_sample_id(const std::string& cve_id) { return cve_id; }
std::string non_vuln_sample_id(const std::string& cve_id) { return "nv-" + cve_id; }

bool touches_supported_language(const github::Commit& commit) {
  return std::any_of(commit.files.begin(), commit.files.end(),
                     [](const github::CommitFile& f) { return f.language != Language::Unsupported; });
}

std::optional<Language> dominant_language(std::span<const github::Commit> commits) {
  std::array<std::size_t, 3> counts{};  // C, Cpp, Java
  for (const auto& c : commits) {
    for (const auto& f : c.files) {
      if (f.language != Language::Unsupported) ++counts[static_cast<std::size_t>(f.language)];
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  if (counts[best] == 0) return std::nullopt;
  return static_cast<Language>(best);
}

DetectionSample build_sample(const nvd::CveRecord& cve, SampleInput artifacts, Label label, bool disclosure_guard) {
  if (artifacts.commits.empty()) fail(ErrorKind::MissingCommit, cve.cve_id + ": no commit");
  if (artifacts.issues.empty() && artifacts.pulls.empty()) fail(ErrorKind::MissingDiscussion, cve.cve_id + ": no issue or PR");
  if (disclosure_guard) {
    auto check = [&](Timestamp t, const std::string& what) {
      if (!(t < cve.disclosed_at)) fail(ErrorKind::PostDisclosureArtifact, cve.cve_id + ": " + what + " is not before disclosure");
    };
    for (const auto& i : artifacts.issues) check(i.created_at, i.repo + "#" + std::to_string(i.number));
    for (const auto& p : artifacts.pulls) check(p.created_at, p.repo + "#" + std::to_string(p.number));
    for (const auto& c : artifacts.commits) check(c.authored_at, c.repo + "@" + c.sha);
  }
  std::erase_if(artifacts.commits, [](const github::Commit& c) { return !touches_supported_language(c); });
  auto language = dominant_language(artifacts.commits);
  if (!language) fail(ErrorKind::UnsupportedLanguageOnly, cve.cve_id + ": no C, C++ or Java changes");

  DetectionSample s;
  s.label = label;
  s.anchor_cve_id = cve.cve_id;
  if (label == Label::Vuln) {
    s.sample_id = vuln_sample_id(cve.cve_id);
    s.cve_id = cve.cve_id;
  } else {
    s.sample_id = non_vuln_sample_id(cve.cve_id);
  }
  s.issues = std::move(artifacts.issues);
  s.pulls = std::move(artifacts.pulls);
  s.commits = std::move(artifacts.commits);
  s.dominant_language = *language;
  s.era = cve.disclosed_at.year();
  return s;
}

namespace {

// Draws `count` items from `pool`, split across labels in proportion
// (largest remainder, Vuln first on ties). Drawn items are removed from pool.
std::vector<const DetectionSample*> stratified_draw(std::vector<const DetectionSample*>& pool, std::size_t count, Rng& rng) {
  std::array<std::vector<const DetectionSample*>, 2> by_label;
  for (auto* s : pool) by_label[s->label == Label::Vuln ? 0 : 1].push_back(s);
  count = std::min(count, pool.size());
  std::array<std::size_t, 2> quota{};
  std::size_t assigned = 0;
  std::array<std::size_t, 2> rem{};
  for (int l = 0; l < 2; ++l) {
    std::size_t num = count * by_label[l].size();
    quota[l] = pool.empty() ? 0 : num / pool.size();
    rem[l] = pool.empty() ? 0 : num % pool.size();
    assigned += quota[l];
  }
  while (assigned < count) {
    int l = rem[0] >= rem[1] ? 0 : 1;
    if (quota[l] >= by_label[l].size()) l = 1 - l;
    ++quota[l];
    ++assigned;
    rem[l] = 0;
  }
  std::vector<const DetectionSample*> drawn, kept;
  for (int l = 0; l < 2; ++l) {
    auto picks = rng.sample_indices(by_label[l].size(), quota[l]);
    std::vector<bool> taken(by_label[l].size(), false);
    for (auto i : picks) {
      taken[i] = true;
      drawn.push_back(by_label[l][i]);
    }
    for (std::size_t i = 0; i < by_label[l].size(); ++i) {
      if (!taken[i]) kept.push_back(by_label[l][i]);
    }
  }
  std::sort(kept.begin(), kept.end(), [](auto* a, auto* b) { return a->sample_id < b->sample_id; });
  pool = std::move(kept);
  return drawn;
}

std::vector<std::string> sorted_ids(const std::vector<const DetectionSample*>& items) {
  std::vector<std::string> ids;
  for (auto* s : items) ids.push_back(s->sample_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

SplitManifest split_dataset(std::span<const DetectionSample> samples, const SplitRatios& ratios, int boundary_year,
                            std::uint64_t seed) {
  if (samples.empty()) fail(ErrorKind::EmptyInput, "no samples to split");
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 || std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-6) {
    fail(ErrorKind::ConfigInvalid, "split ratios must be non-negative and sum to 1");
  }
  std::vector<const DetectionSample*> post, at, pre;
  {
    std::map<std::string, const DetectionSample*> by_id;
    for (const auto& s : samples) {
      if (!by_id.emplace(s.sample_id, &s).second) fail(ErrorKind::InvalidArgument, "duplicate sample id " + s.sample_id);
    }
    for (auto& [id, s] : by_id) (s->era > boundary_year ? post : s->era == boundary_year ? at : pre).push_back(s);
  }
  if (post.empty() && at.empty()) fail(ErrorKind::EmptyEra, "no samples from " + std::to_string(boundary_year) + " onward");

  const auto n = static_cast<double>(samples.size());
  const auto n_test = static_cast<std::size_t>(std::llround(ratios.test * n));
  const auto n_val = static_cast<std::size_t>(std::llround(ratios.val * n));

  Rng rng(seed);
  auto test = stratified_draw(post, n_test, rng);
  if (test.size() < n_test) {
    auto fill = stratified_draw(at, n_test - test.size(), rng);
    test.insert(test.end(), fill.begin(), fill.end());
  }
  std::vector<const DetectionSample*> pool = pre;
  pool.insert(pool.end(), at.begin(), at.end());
  std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->sample_id < b->sample_id; });
  auto val = stratified_draw(pool, n_val, rng);

  SplitManifest m;
  m.test_ids = sorted_ids(test);
  m.val_ids = sorted_ids(val);
  m.train_ids = sorted_ids(pool);
  m.unassigned_ids = sorted_ids(post);
  m.boundary_year = boundary_year;
  m.seed = seed;
  m.boundary_policy = "test: era > " + std::to_string(boundary_year) + " first, topped up from era == " +
                      std::to_string(boundary_year) + "; train/val: era <= " + std::to_string(boundary_year) +
                      "; surplus later-era samples unassigned";
  return m;
}

Json to_json(const DetectionSample& s) {
  Json issues = Json::array(), pulls = Json::array(), commits = Json::array();
  for (const auto& i : s.issues) issues.push_back(github::to_json(i));
  for (const auto& p : s.pulls) pulls.push_back(github::to_json(p));
  for (const auto& c : s.commits) commits.push_back(github::to_json(c));
  return Json{{"sample_id", s.sample_id},
              {"cve_id", s.cve_id ? Json(*s.cve_id) : Json(nullptr)},
              {"anchor_cve_id", s.anchor_cve_id},
              {"label", std::string(to_string(s.label))},
              {"dominant_language", std::string(to_string(s.dominant_language))},
              {"era", s.era},
              {"issues", std::move(issues)},
              {"pulls", std::move(pulls)},
              {"commits", std::move(commits)}};
}

DetectionSample detection_sample_from_json(const Json& row) {
  try {
    DetectionSample s;
    s.sample_id = row.at("sample_id").get<std::string>();
    if (!row.at("cve_id").is_null()) s.cve_id = row.at("cve_id").get<std::string>();
    s.anchor_cve_id = row.at("anchor_cve_id").get<std::string>();
    s.label = label_from_string(row.at("label").get<std::string>());
    s.dominant_language = language_from_string(row.at("dominant_language").get<std::string>());
    s.era = row.at("era").get<int>();
    for (const auto& i : row.at("issues")) s.issues.push_back(github::issue_from_json(i));
    for (const auto& p : row.at("pulls")) s.pulls.push_back(github::pull_from_json(p));
    for (const auto& c : row.at("commits")) s.commits.push_back(github::commit_from_json(c));
    if (s.label == Label::Vuln && !s.cve_id) fail(ErrorKind::MalformedRecord, s.sample_id + ": vulnerable sample without cve_id");
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("dataset row: ") + e.what());
  }
}

Json to_json(const SplitManifest& m) {
  return Json{{"boundary_year", m.boundary_year}, {"seed", m.seed},         {"boundary_policy", m.boundary_policy},
              {"train_ids", m.train_ids},         {"val_ids", m.val_ids},   {"test_ids", m.test_ids},
              {"unassigned_ids", m.unassigned_ids}};
}

SplitManifest split_manifest_from_json(const Json& row) {
  try {
    SplitManifest m;
    m.boundary_year = row.at("boundary_year").get<int>();
    m.seed = row.at("seed").get<std::uint64_t>();
    m.boundary_policy = row.value("boundary_policy", std::string{});
    m.train_ids = row.at("train_ids").get<std::vector<std::string>>();
    m.val_ids = row.at("val_ids").get<std::vector<std::string>>();
    m.test_ids = row.at("test_ids").get<std::vector<std::string>>();
    m.unassigned_ids = row.value("unassigned_ids", std::vector<std::string>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("split manifest: ") + e.what());
  }
}

std::vector<DetectionSample> read_dataset(const std::string& path) {
  std::vector<DetectionSample> out;
  for (const auto& row : read_jsonl(path)) out.push_back(detection_sample_from_json(row));
  return out;
}

}  // namespace pcve::dataset
