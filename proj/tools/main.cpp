#include <iostream>

#include "bessmarket/commands.hpp"

int main(int argc, char** argv) {
    return bessmarket::cli_main(argc, argv, std::cout, std::cerr);
}
