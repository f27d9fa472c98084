#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rcm::cli {

// Flat key=value lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_config(const std::string& path);

// Removes "--config FILE" / "--config=FILE" from args and turns the file's entries into
// "--key=value" arguments placed right after the subcommand name, skipping keys already given
// on the command line. args[0] is the program name.
std::vector<std::string> expand_config(std::vector<std::string> args);

// "pc" resolves to the critical point of q.
double parse_p(const std::string& text, double q);

// Shortest representation that reads back to the same double.
std::string num(double x);

std::string csv_field(const std::string& s);

// Hex SHA-1 of "blob <size>\0<content>", as git hashes a file.
std::string git_blob_hash(const std::string& content);

std::string utc_now();

// Provenance of one invocation. The id is derived from the inputs only, so replaying the same
// command reproduces it; timestamps live in the record file and never in data outputs.
struct RunRecord {
    std::string command;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
    std::vector<std::string> input_files;
    std::string content_hash;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;

    void seal();  // computes content_hash from command, params and input file contents
    std::string id() const { return content_hash.substr(0, 12); }
    std::string to_json() const;
};

// Runs body(i) for i in [0, n) on up to `jobs` threads. Results must be stored by index.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

}  // namespace rcm::cli
