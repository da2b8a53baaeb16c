#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return fsq::cli::run(args, {std::cin, std::cout, std::cerr, ::isatty(STDIN_FILENO) != 0});
}
