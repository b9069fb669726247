#include <string>
#include <vector>

#include "shelfmap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return shelfmap::run_cli(std::move(args));
}
