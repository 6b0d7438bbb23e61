#include <string>
#include <vector>

#include "vmcsim/experiment.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vmc::cli_main(args);
}
