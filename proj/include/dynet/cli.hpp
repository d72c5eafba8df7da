// Copyright 2026 The dynet-causes authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The `dynet-causes` command line: `lts`, `causes` and `check-word`.
//
// Exit codes: 0 success (causes found / word matches), 1 clean negative
// result (hazard unreachable / word does not match), 2 diagnostics, 3 no
// witness within --max-len.

#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynet/causality.hpp"
#include "dynet/diagnostic.hpp"
#include "dynet/hazard.hpp"
#include "dynet/lts.hpp"
#include "dynet/spec_language.hpp"

namespace dynet::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitNegative = 1,
  kExitDiagnostic = 2,
  kExitBoundExceeded = 3,
};

enum class Format { kText, kJson, kDot };

struct RunConfig {
  std::string spec_path;
  std::optional<std::string> hazard;
  std::optional<std::string> hazard_file;
  Anchor anchor = Anchor::kAnywhere;
  SyncMatch sync_match = SyncMatch::kSyntactic;
  std::size_t max_states = kDefaultMaxStates;
  std::optional<std::size_t> max_len;
  Format format = Format::kText;
  std::optional<std::string> output_path;
  std::vector<std::string> word;
};

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Stage::kIo, "cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline NetworkSpec LoadSpec(const RunConfig& config) {
  NetworkSpec spec = ParseSpec(ReadFile(config.spec_path));
  ValidateGuardedness(spec);
  return spec;
}

inline std::string LoadHazard(const RunConfig& config) {
  if (config.hazard.has_value() && config.hazard_file.has_value()) {
    throw Error(Stage::kHazard, "give either --hazard or --hazard-file, not both");
  }
  if (config.hazard_file.has_value()) return ReadFile(*config.hazard_file);
  if (config.hazard.has_value()) return *config.hazard;
  throw Error(Stage::kHazard, "missing --hazard or --hazard-file");
}

inline void Emit(const RunConfig& config, const std::string& text,
                 std::ostream& out) {
  if (!config.output_path.has_value()) {
    out << text;
    return;
  }
  std::ofstream file(*config.output_path, std::ios::binary);
  if (!file) throw Error(Stage::kIo, "cannot write '" + *config.output_path + "'");
  file << text;
}

inline int RunLts(const RunConfig& config, std::ostream& out,
                  std::ostream& err) {
  try {
    const NetworkSpec spec = LoadSpec(config);
    const Lts lts = BuildLts(spec, LtsOptions{config.max_states, config.sync_match});
    switch (config.format) {
      case Format::kDot:
        Emit(config, ExportDot(spec, lts), out);
        break;
      case Format::kJson:
        Emit(config, ExportJson(spec, lts), out);
        break;
      case Format::kText:
        Emit(config, ExportText(spec, lts), out);
        break;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitDiagnostic;
  }
}

inline int RunCauses(const RunConfig& config, std::ostream& out,
                     std::ostream& err) {
  try {
    if (config.format == Format::kDot) {
      throw Error(Stage::kIo, "the causes report supports text and json only");
    }
    const NetworkSpec spec = LoadSpec(config);
    const std::string hazard = LoadHazard(config);
    const CauseReport report = ComputeCauses(
        spec, hazard,
        CauseOptions{config.anchor, config.sync_match, config.max_states,
                     config.max_len});
    Emit(config,
         config.format == Format::kJson ? CauseReportToJson(report)
                                        : CauseReportToText(report),
         out);
    switch (report.verdict) {
      case Verdict::kCausesFound:
        return kExitOk;
      case Verdict::kHazardUnreachable:
        return kExitNegative;
      case Verdict::kWitnessBoundExceeded:
        return kExitBoundExceeded;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitDiagnostic;
  }
}

inline int RunCheckWord(const RunConfig& config, std::ostream& out,
                        std::ostream& err) {
  try {
    const NetworkSpec spec = LoadSpec(config);
    const HazardExpr hazard =
        Anchored(ParseHazard(LoadHazard(config), spec), config.anchor);
    std::string text;
    for (const std::string& part : config.word) text += part + " ";
    const std::vector<Label> word = ParseWord(text, spec);
    const Lts lts = BuildLts(spec, LtsOptions{config.max_states, config.sync_match});
    if (ReplayWord(lts, word).empty()) {
      err << "replay: the word is not a trace of the LTS\n";
      return kExitDiagnostic;
    }
    if (MatchWord(hazard, word)) {
      out << "match\n";
      return kExitOk;
    }
    out << "no match\n";
    return kExitNegative;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitDiagnostic;
  }
}

// Budget used when --max-states is absent: $DYNET_CAUSES_MAX_STATES, else the
// library default.
inline std::size_t DefaultMaxStates() {
  if (const char* env = std::getenv("DYNET_CAUSES_MAX_STATES")) {
    try {
      return static_cast<std::size_t>(std::stoull(env));
    } catch (const std::exception&) {
    }
  }
  return kDefaultMaxStates;
}

inline int RunCli(int argc, const char* const* argv, std::ostream& out,
                  std::ostream& err) {
  CLI::App app{"Counterfactual causes of hazards in DyNetKAT network models",
               "dynet-causes"};
  app.require_subcommand(1);

  RunConfig config;
  config.max_states = DefaultMaxStates();
  std::string format = "text";
  std::string anchor = "anywhere";
  std::string sync_match = "syntactic";
  std::optional<std::size_t> max_states;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", config.spec_path, "Specification file")
        ->required();
    sub->add_option("--sync-match", sync_match,
                    "Policy matching for synchronisation")
        ->check(CLI::IsMember({"syntactic", "semantic"}));
    sub->add_option("--max-states", max_states, "State budget");
    sub->add_option("-o,--output", config.output_path, "Output file");
  };
  auto add_hazard = [&](CLI::App* sub) {
    sub->add_option("--hazard", config.hazard, "Hazard expression");
    sub->add_option("--hazard-file", config.hazard_file, "File with the hazard");
    sub->add_option("--anchor", anchor, "Where a hazard match may begin")
        ->check(CLI::IsMember({"start", "anywhere"}));
  };

  CLI::App* lts = app.add_subcommand("lts", "Build and export the LTS");
  add_common(lts);
  lts->add_option("--format", format, "text, json or dot")
      ->check(CLI::IsMember({"text", "json", "dot"}));

  CLI::App* causes = app.add_subcommand("causes", "Compute causes of a hazard");
  add_common(causes);
  add_hazard(causes);
  causes->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  causes->add_option("--max-len", config.max_len, "Longest witness considered");

  CLI::App* check = app.add_subcommand(
      "check-word", "Replay a word and match it against the hazard");
  add_common(check);
  add_hazard(check);
  check->add_option("word", config.word, "Labels, e.g. 'proc(s1,s2)'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitDiagnostic;
  }

  if (max_states.has_value()) config.max_states = *max_states;
  config.format = format == "json"  ? Format::kJson
                  : format == "dot" ? Format::kDot
                                    : Format::kText;
  config.anchor = anchor == "start" ? Anchor::kStart : Anchor::kAnywhere;
  config.sync_match =
      sync_match == "semantic" ? SyncMatch::kSemantic : SyncMatch::kSyntactic;

  if (lts->parsed()) return RunLts(config, out, err);
  if (causes->parsed()) return RunCauses(config, out, err);
  return RunCheckWord(config, out, err);
}

}  // namespace dynet::cli
