#include <iostream>

#include "qnd/cli.hpp"

int main(int argc, char **argv)
{
    return qnd::run_cli(argc, argv, std::cout, std::cerr);
}
