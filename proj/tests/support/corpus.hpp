#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace pcve::testing {

// Knobs for the synthetic mining corpus. Each PCVE gets its own repository
// with one fixing commit and one issue (or PR) referenced from NVD, plus a
// pool of unrelated commits and issues around them for non-vulnerable draws.
struct CorpusOptions {
  std::size_t pcves = 100;
  std::size_t recent = 10;       // PCVEs disclosed after 2020
  std::size_t short_delta = 8;   // GitHub-referenced but under a year
  std::size_t no_github = 4;     // only non-GitHub references
  std::size_t pool = 8;          // unrelated commits and issues per repo
  std::uint64_t seed = 7;

  // Probability that a vulnerable artifact carries a planted weakness
  // phrase, per channel, and that an unrelated artifact carries one anyway.
  double issue_signal = 0.85;
  double message_signal = 0.6;
  double code_signal = 0.5;
  double decoy_rate = 0.02;
  double pull_share = 0.2;  // PCVEs whose discussion is a PR rather than an issue
};

struct CorpusLayout {
  std::filesystem::path root;
  std::filesystem::path feed;      // NVD 2.0 JSON
  std::filesystem::path fixtures;  // GitHub API responses for FixtureTransport
  std::filesystem::path config;    // offline pipeline config
  std::size_t pcves = 0;
};

// Writes feed, fixtures and config under `root` (created if needed).
// Output depends only on the options.
CorpusLayout write_corpus(const std::filesystem::path& root, const CorpusOptions& options = {});

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& label);

}  // namespace pcve::testing
