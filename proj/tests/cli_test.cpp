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


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace {

struct Result {
  int exit_code;
  std::string out;
  std::string err;
};

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string Quote(const std::string& arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

// Runs the installed binary through the shell, capturing both streams.
Result Invoke(const std::vector<std::string>& args, const std::string& env = "") {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("dynet_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::string command = env + " " + Quote(DYNET_CLI_PATH);
  for (const std::string& a : args) command += " " + Quote(a);
  command += " >" + Quote((dir / "out").string()) + " 2>" + Quote((dir / "err").string());
  const int status = std::system(command.c_str());
  return Result{WEXITSTATUS(status), Slurp(dir / "out"), Slurp(dir / "err")};
}

const std::string kSpec = std::string(DYNET_SOURCE_DIR) + "/specs/virtual_circuit.dnk";
const std::string kHazardFile =
    std::string(DYNET_SOURCE_DIR) + "/specs/virtual_circuit.hazard";

TEST(CliTest, LtsDot) {
  const Result r = Invoke({"lts", kSpec, "--format", "dot"});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("digraph lts {", 0), 0u);
}

TEST(CliTest, LtsJsonCounts) {
  const Result r = Invoke({"lts", kSpec, "--format", "json"});
  ASSERT_EQ(r.exit_code, 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["states"].size(), 49u);
  EXPECT_EQ(j["transitions"].size(), 276u);
}

TEST(CliTest, MissingFile) {
  const Result r = Invoke({"lts", "/nonexistent/spec.dnk"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.err.rfind("io:", 0), 0u);
}

TEST(CliTest, ParseErrorCarriesLocation) {
  const auto path = std::filesystem::temp_directory_path() / "dynet_bad.dnk";
  std::ofstream(path) << "fields { port: {1} }\ndef X = Y\ninit = X\n";
  const Result r = Invoke({"lts", path.string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.err, "parse: 2:9: unknown variable 'Y'\n");
}

TEST(CliTest, UnguardedSpecIsValidationError) {
  const auto path = std::filesystem::temp_directory_path() / "dynet_unguarded.dnk";
  std::ofstream(path) << "fields { port: {1} }\ndef X = X\ninit = X\n";
  const Result r = Invoke({"lts", path.string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.err, "validation: unguarded recursion: X -> X\n");
}

TEST(CliTest, CausesFound) {
  const Result r = Invoke({"causes", kSpec, "--hazard-file", kHazardFile});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("verdict: causes-found"), std::string::npos);
}

TEST(CliTest, CausesUnreachable) {
  EXPECT_EQ(Invoke({"causes", kSpec, "--hazard", "0"}).exit_code, 1);
}

TEST(CliTest, CausesBoundExceeded) {
  EXPECT_EQ(Invoke({"causes", kSpec, "--hazard-file", kHazardFile, "--max-len", "1"}).exit_code,
            3);
}

TEST(CliTest, HazardFlags) {
  EXPECT_EQ(Invoke({"causes", kSpec}).exit_code, 2);
  EXPECT_EQ(Invoke({"causes", kSpec, "--hazard", "0", "--hazard-file", kHazardFile}).exit_code,
            2);
  const Result bad = Invoke({"causes", kSpec, "--hazard", "proc(s9,s1)"});
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_EQ(bad.err.rfind("hazard:", 0), 0u);
}

TEST(CliTest, BadArguments) {
  EXPECT_EQ(Invoke({}).exit_code, 2);
  EXPECT_EQ(Invoke({"lts", kSpec, "--format", "xml"}).exit_code, 2);
  EXPECT_EQ(Invoke({"causes", kSpec, "--hazard", "0", "--format", "dot"}).exit_code, 2);
  EXPECT_EQ(Invoke({"--help"}).exit_code, 0);
}

TEST(CliTest, StateBudgetFromEnvironment) {
  const Result r = Invoke({"lts", kSpec}, "DYNET_CAUSES_MAX_STATES=5");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.err.rfind("budget:", 0), 0u);
  EXPECT_EQ(Invoke({"lts", kSpec, "--max-states", "100"}, "DYNET_CAUSES_MAX_STATES=5").exit_code,
            0);
}

TEST(CliTest, CheckWordOnEveryCause) {
  const Result r = Invoke({"causes", kSpec, "--hazard-file", kHazardFile, "--format", "json"});
  ASSERT_EQ(r.exit_code, 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  ASSERT_FALSE(j["causes"].empty());
  for (const auto& cause : j["causes"]) {
    std::vector<std::string> args = {"check-word", kSpec, "--hazard-file", kHazardFile};
    for (const auto& label : cause["word"]) args.push_back(label.get<std::string>());
    EXPECT_EQ(Invoke(args).exit_code, 0) << cause.dump();
  }
}

TEST(CliTest, CheckWordOutcomes) {
  EXPECT_EQ(Invoke({"check-word", kSpec, "--hazard", "any*"}).exit_code, 0);
  const Result no = Invoke({"check-word", kSpec, "--hazard", "proc(s3,s4)",
                         "sync(NoVirtualCircuit,one)"});
  EXPECT_EQ(no.exit_code, 1);
  EXPECT_EQ(no.out, "no match\n");
  EXPECT_EQ(Invoke({"check-word", kSpec, "--hazard", "any*", "proc(s1,s2)"}).exit_code, 2);
  EXPECT_EQ(Invoke({"check-word", kSpec, "--hazard", "any*", "send(Nowhere,one)"}).exit_code, 2);
}

TEST(CliTest, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "dynet_out.json";
  std::filesystem::remove(path);
  const Result r = Invoke({"lts", kSpec, "--format", "json", "-o", path.string()});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(Slurp(path), Invoke({"lts", kSpec, "--format", "json"}).out);
}

TEST(CliTest, ByteDeterministic) {
  const std::vector<std::string> args = {"causes", kSpec, "--hazard-file", kHazardFile,
                                         "--format", "json"};
  EXPECT_EQ(Invoke(args).out, Invoke(args).out);
  EXPECT_EQ(Invoke({"lts", kSpec, "--format", "dot"}).out,
            Invoke({"lts", kSpec, "--format", "dot"}).out);
}

}  // namespace
