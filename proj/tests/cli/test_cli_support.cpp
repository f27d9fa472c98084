#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <fstream>

#include "cli_support.hpp"
#include "doctest.h"
#include "rcm/model.hpp"

using namespace rcm::cli;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
    const std::string path = std::string(P_tmpdir) + "/" + name;
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST_CASE("git blob hashes") {
    // `git hash-object` of an empty file and of "hello\n".
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("p parsing") {
    CHECK(parse_p("pc", 2.0) == rcm::ModelParams::critical_p(2.0));
    CHECK(parse_p("0.25", 1.0) == 0.25);
    CHECK_THROWS_AS(parse_p("0.25x", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(parse_p("", 1.0), std::invalid_argument);
}

TEST_CASE("number and csv formatting") {
    CHECK(num(0.1) == "0.1");
    CHECK(num(2.0) == "2");
    CHECK(std::stod(num(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"x\"") == "\"say \"\"x\"\"\"");
}

TEST_CASE("config files") {
    const auto path = temp_file("rcm_cli_cfg.txt", "# comment\nq = 2\n--p=pc\n\nR=4,8 # trailing\n");
    const auto cfg = read_config(path);
    CHECK(cfg.size() == 3);
    CHECK(cfg.at("q") == "2");
    CHECK(cfg.at("p") == "pc");
    CHECK(cfg.at("R") == "4,8");

    auto args = expand_config({"rcm", "measure", "--config", path, "--q=3"});
    REQUIRE(args.size() == 5);
    CHECK(args[1] == "measure");
    // The command line wins: q comes only from the flag.
    CHECK(std::count(args.begin(), args.end(), "--q=2") == 0);
    CHECK(std::count(args.begin(), args.end(), "--p=pc") == 1);
    CHECK(std::count(args.begin(), args.end(), "--R=4,8") == 1);
    CHECK(args.back() == "--q=3");

    CHECK(expand_config({"rcm", "oracle"}).size() == 2);
    CHECK_THROWS_AS(expand_config({"rcm", "--config", path}), std::invalid_argument);
    CHECK_THROWS_AS(read_config(temp_file("rcm_cli_bad.txt", "novalue\n")), std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("run record ids depend on inputs only") {
    RunRecord a;
    a.command = "measure";
    a.params = {{"q", "2"}, {"seed", "7"}};
    a.started = "2000-01-01T00:00:00Z";
    a.seal();
    RunRecord b = a;
    b.started = "2030-01-01T00:00:00Z";
    b.seal();
    CHECK(a.id() == b.id());
    CHECK(a.id().size() == 12);
    b.params["seed"] = "8";
    b.seal();
    CHECK(a.id() != b.id());
    CHECK(a.to_json().find("\"id\": \"" + a.id() + "\"") != std::string::npos);
}

TEST_CASE("parallel_for covers every index once") {
    std::vector<int> hits(100, 0);
    parallel_for(100, 3, [&](int i) { hits[i] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
    CHECK_THROWS_AS(parallel_for(10, 2, [](int i) { if (i == 5) throw std::runtime_error("x"); }),
                    std::runtime_error);
}
