#include <cstdio>
#include <iostream>

#include "algdyn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    algdyn::cli::RunResult r = algdyn::cli::run(args);
    std::cout << r.report;
    return r.exit_code;
}
