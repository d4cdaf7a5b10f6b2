#include <vector>

#include "gravac/scenario.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gravac::cli_run(args);
}
