#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef PNLEVP_CLI
#error "PNLEVP_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "pnlevp_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = std::string("cd '") + workdir().string() + "' && '" PNLEVP_CLI "' " +
                          args + " 2>'" + err.string() + "'";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int count_fields(const std::string& l) {
  std::istringstream in(l);
  int n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& l : lines(text))
    if (!l.empty() && l[0] != '#') out.push_back(l);
  return out;
}

const std::string& delay_model() {
  static const std::string path = [] {
    const Run r = run("offline --problem delay --disk 0,0,0.075 --p 30:35 --q 40 --r 20 --N 128 "
                      "--seed 7 --out delay.model");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("m = 4") != std::string::npos);
    return std::string("delay.model");
  }();
  return path;
}

const std::string& linear_model() {
  static const std::string path = [] {
    const Run r = run("offline --problem linear-demo --disk 0,0,0.6 --p 0.75:1.25 --q 40 --r 20 "
                      "--N 512 --seed 1 --out linear.model");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("m = 2") != std::string::npos);
    return std::string("linear.model");
  }();
  return path;
}

}  // namespace

TEST_CASE("offline writes a model and reports the eigenvalue count") {
  CHECK(fs::exists(workdir() / delay_model()));
  CHECK_FALSE(fs::exists(workdir() / (delay_model() + ".tmp")));
}

TEST_CASE("online prints one line per eigenvalue") {
  const Run r = run("online --model " + delay_model() + " --p 30");
  CHECK(r.code == 0);
  CHECK(data_rows(r.out).size() == 5);  // header and four eigenvalues
  CHECK(r.err.find("outside the sampled parameter range") == std::string::npos);

  const Run far = run("online --model " + delay_model() + " --p 50");
  CHECK(far.code == 0);
  CHECK(data_rows(far.out).size() == 5);
  CHECK(far.err.find("outside the sampled parameter range") != std::string::npos);
  CHECK(far.out.find("warning") == std::string::npos);
}

TEST_CASE("online with a missing model exits with an I/O error") {
  const Run r = run("online --model nowhere.model --p 1");
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("online with a truncated model exits with an I/O error") {
  const std::string text = slurp(workdir() / linear_model());
  std::ofstream(workdir() / "truncated.model") << text.substr(0, text.size() / 3);
  CHECK(run("online --model truncated.model --p 1").code == 1);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("offline --problem delay --disk 0,0,0 --p 30:35 --out x.model").code == 2);
  CHECK(run("offline --problem delay --disk 0,0,-1 --p 30:35 --out x.model").code == 2);
  CHECK(run("offline --problem delay --disk 0,0,0.075 --p 35:30 --out x.model").code == 2);
  CHECK(run("offline --problem nope --disk 0,0,1 --p 0:1 --out x.model").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK_FALSE(fs::exists(workdir() / "x.model"));
  const Run bench = run("bench nope");
  CHECK(bench.code == 2);
  CHECK(bench.err.find("linear-1") != std::string::npos);
  CHECK(run("sweep --model " + linear_model() + " --n 0").code == 2);
}

TEST_CASE("a parameter-dependent eigenvalue count exits with code 2") {
  // the built-in synthetic problem has paths that leave this small disk
  const Run r = run("offline --problem synthetic --disk 0,0,0.2 --p 0:1 --q 12 --r 6 --N 256 "
                    "--out crossing.model");
  CHECK(r.code == 2);
  CHECK(r.err.find("ranks") != std::string::npos);
  CHECK_FALSE(fs::exists(workdir() / "crossing.model"));
}

TEST_CASE("sweep writes a header and one row per parameter") {
  const Run r = run("sweep --model " + linear_model() + " --range 0:2 --n 200 --out lin.dat");
  CHECK(r.code == 0);
  const std::string text = slurp(workdir() / "lin.dat");
  REQUIRE_FALSE(text.empty());
  CHECK(text[0] == '#');
  const auto rows = data_rows(text);
  REQUIRE(rows.size() == 200);
  for (const auto& row : rows) CHECK(count_fields(row) == 6);

  CHECK(run("sweep --model " + linear_model() + " --n 1 --out one.dat").code == 0);
  CHECK(data_rows(slurp(workdir() / "one.dat")).size() == 1);

  // identical inputs give identical files
  CHECK(run("sweep --model " + linear_model() + " --range 0:2 --n 200 --out lin2.dat").code == 0);
  CHECK(slurp(workdir() / "lin2.dat") == text);
  CHECK(run("--threads 1 sweep --model " + linear_model() + " --range 0:2 --n 200 --out lin3.dat")
            .code == 0);
  CHECK(slurp(workdir() / "lin3.dat") == text);
}

TEST_CASE("identical offline runs give identical model files") {
  const Run r = run("offline --problem linear-demo --disk 0,0,0.6 --p 0.75:1.25 --q 40 --r 20 "
                    "--N 512 --seed 1 --out linear_again.model");
  REQUIRE(r.code == 0);
  CHECK(slurp(workdir() / "linear_again.model") == slurp(workdir() / linear_model()));
}

TEST_CASE("bench reports PASS for the linear example") {
  const Run r = run("bench linear-1 --out-dir bench");
  CHECK(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE_FALSE(ls.empty());
  CHECK(ls.back() == "PASS");
  CHECK(fs::exists(workdir() / "bench" / "linear-1.dat"));
}
