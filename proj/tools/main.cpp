#include <skewsphere/cli/commands.hpp>

#include <iostream>

int main(int argc, char** argv) { return skewsphere::cli::run(argc, argv, std::cout, std::cerr); }
