#include <iostream>

#include "qva/cli.h"

int main(int argc, char** argv) { return qva::cli::main(argc, argv, std::cout, std::cerr); }
