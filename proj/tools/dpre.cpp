#include <iostream>

#include "dpre/cli.hpp"

int main(int argc, char** argv) { return dpre::main_entry(argc, argv, std::cout, std::cerr); }
