#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsq::cli {

enum ExitStatus : int {
    exit_ok = 0,
    exit_input_error = 2,
    exit_query_error = 3,
};

/// Environment variable naming the default workspace directory.
inline constexpr const char* workspace_env = "FSQ_WORKSPACE";

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    /// Print a prompt before each REPL line.
    bool interactive = false;
};

/// Runs one command line (`args[0]` is the program name) and returns the exit status.
int run(const std::vector<std::string>& args, Streams io);

}  // namespace fsq::cli
