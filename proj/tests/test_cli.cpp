#include <doctest.h>

#include <array>
#include <cstdio>
#include <string>

#include "test_helpers.hpp"

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args) {
  const std::string command = std::string(SIGNREC_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buffer;
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("utility").exit_code == 1);  // missing required --lexicon
}

TEST_CASE("help exits cleanly") {
  const auto r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("experiment") != std::string::npos);
}

TEST_CASE("data errors exit with code 2") {
  CHECK(run_cli("utility --lexicon /nonexistent/lex.csv").exit_code == 1);
  TempDir dir;
  write_file(dir.file("bad.csv"), "gloss,t1\nA,a\nB,a\n");  // single value column
  CHECK(run_cli("utility --lexicon " + dir.file("bad.csv")).exit_code == 2);
}

TEST_CASE("synth, describe, stats, utility, select work end to end") {
  TempDir dir;
  const std::string data = dir.file("data");
  auto synth = run_cli("synth --out " + data +
                       " --glosses 6 --cardinalities 3,3,2 --videos-per-gloss 4"
                       " --frames 6 --keypoints 6 --sigma 0.05 --coverage 0.75"
                       " --seed 3");
  INFO(synth.output);
  REQUIRE(synth.exit_code == 0);
  CHECK(synth.output.find("24 videos") != std::string::npos);
  CHECK(synth.output.find("18 labeled") != std::string::npos);  // round(0.75*24)

  auto describe = run_cli("describe-inventory --lexicon " + data + "/lexicon.csv");
  CHECK(describe.exit_code == 0);
  CHECK(describe.output.find("handshape") != std::string::npos);
  CHECK(describe.output.find("location") != std::string::npos);

  auto describe_json =
      run_cli("describe-inventory --format json --lexicon " + data + "/lexicon.csv");
  CHECK(describe_json.exit_code == 0);
  CHECK(describe_json.output.find("\"types\"") != std::string::npos);

  auto stats = run_cli("lexicon-stats --lexicon " + data + "/lexicon.csv");
  CHECK(stats.exit_code == 0);
  CHECK(stats.output.find("signs: 6") != std::string::npos);

  auto utility = run_cli("utility --lexicon " + data + "/lexicon.csv --subset all");
  CHECK(utility.exit_code == 0);
  CHECK(utility.output.find("utility") != std::string::npos);

  auto select = run_cli("select --lexicon " + data +
                        "/lexicon.csv --n-list 0,1,2 --format json");
  CHECK(select.exit_code == 0);
  CHECK(select.output.find("\"method\": \"exact\"") != std::string::npos);
}

TEST_CASE("join prints a coverage summary and writes joined metadata") {
  TempDir dir;
  write_file(dir.file("lex.csv"),
             "gloss,shape,place\nhello,fist,chin\nbye,open,chest\n");
  write_file(dir.file("meta.json"), R"([
    {"gloss":"HELLO","instances":[
      {"video_id":"a","split":"train"},{"video_id":"b","split":"test"}]},
    {"gloss":"missing","instances":[{"video_id":"c","split":"val"}]}
  ])");
  auto join = run_cli("join --metadata " + dir.file("meta.json") + " --lexicon " +
                      dir.file("lex.csv") + " --out " + dir.file("joined.json"));
  INFO(join.output);
  CHECK(join.exit_code == 0);
  CHECK(join.output.find("coverage: 66.7%") != std::string::npos);

  const std::string joined = read_file(dir.file("joined.json"));
  CHECK(joined.find("phonemes") != std::string::npos);

  auto join_json = run_cli("join --format json --metadata " + dir.file("meta.json") +
                           " --lexicon " + dir.file("lex.csv"));
  CHECK(join_json.exit_code == 0);
  CHECK(join_json.output.find("\"matched_signs\": 1") != std::string::npos);
}

TEST_CASE("gradcheck subcommand prints one line per grid entry") {
  auto r = run_cli("gradcheck");
  INFO(r.output);
  CHECK(r.exit_code == 0);
  int pass_lines = 0;
  std::size_t pos = 0;
  while ((pos = r.output.find("PASS", pos)) != std::string::npos) {
    ++pass_lines;
    pos += 4;
  }
  CHECK(pass_lines == 12);
}

TEST_CASE("train, eval and probe on a tiny dataset") {
  TempDir dir;
  const std::string data = dir.file("data");
  REQUIRE(run_cli("synth --out " + data +
                  " --glosses 4 --cardinalities 2,2,2 --videos-per-gloss 5"
                  " --frames 6 --keypoints 6 --sigma 0.05 --coverage 1.0 --seed 9")
              .exit_code == 0);

  auto train = run_cli("train --data " + data + " --subset optimal:1 --out " +
                       dir.file("m.ckpt") + " --log " + dir.file("log.jsonl") +
                       " --t-model 6 --embed-dim 12 --max-epochs 8 --seed 1");
  INFO(train.output);
  REQUIRE(train.exit_code == 0);
  CHECK(read_file(dir.file("log.jsonl")).find("\"epoch\":1") != std::string::npos);

  auto eval = run_cli("eval --data " + data + " --checkpoint " + dir.file("m.ckpt") +
                      " --split test --format json");
  INFO(eval.output);
  CHECK(eval.exit_code == 0);
  CHECK(eval.output.find("\"with_labels\"") != std::string::npos);

  auto probe = run_cli("probe --data " + data + " --out " + dir.file("probe") +
                       " --t-model 6 --embed-dim 12 --max-epochs 8");
  INFO(probe.output);
  CHECK(probe.exit_code == 0);
  CHECK(probe.output.find("handshape") != std::string::npos);
  CHECK(read_file(dir.file("probe") + "/probe.csv")
            .find("type,full_model,probe,majority") != std::string::npos);
}

TEST_CASE("experiment writes a deterministic report") {
  TempDir dir;
  const std::string data = dir.file("data");
  REQUIRE(run_cli("synth --out " + data +
                  " --glosses 4 --cardinalities 2,3,2 --videos-per-gloss 5"
                  " --frames 6 --keypoints 6 --sigma 0.1 --coverage 0.6 --seed 21")
              .exit_code == 0);

  const std::string flags = " --data " + data +
                            " --subset optimal:2 --seeds 0,1"
                            " --t-model 6 --embed-dim 12 --max-epochs 6";
  auto first = run_cli("experiment --out " + dir.file("out1") + flags);
  INFO(first.output);
  REQUIRE(first.exit_code == 0);
  CHECK(first.output.find("delta improvement") != std::string::npos);

  auto second = run_cli("experiment --out " + dir.file("out2") + flags);
  REQUIRE(second.exit_code == 0);
  CHECK(read_file(dir.file("out1") + "/report.json") ==
        read_file(dir.file("out2") + "/report.json"));

  auto compare = run_cli("compare --a " + dir.file("out1") + "/report.json --b " +
                         dir.file("out2") + "/report.json");
  INFO(compare.output);
  CHECK(compare.exit_code == 0);
  CHECK(compare.output.find("A@1") != std::string::npos);

  auto sweep = run_cli("experiment --sweep --sweep-sizes 0,1,3 --out " +
                       dir.file("sweep") + flags);
  INFO(sweep.output);
  CHECK(sweep.exit_code == 0);
  CHECK(read_file(dir.file("sweep") + "/sweep.json").find("\"n\": 3") !=
        std::string::npos);
}
