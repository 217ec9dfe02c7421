#include <iostream>

#include "ddslab/xcli.hpp"

int main(int argc, char** argv) { return ddslab::xcli::run(argc, argv, std::cout, std::cerr); }
