#include <iostream>
#include <string>
#include <vector>

#include "phasemem/cli.hpp"

int main(int argc, char** argv) {
    return phasemem::cli::execute(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
