#include <iostream>

#include "btcmine/cli.hpp"

int main(int argc, char** argv) { return btcmine::cli::run(argc, argv, std::cout, std::cerr); }
