#include "refugia/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return refugia::cli::run(argc, argv, std::cout, std::cerr);
}
