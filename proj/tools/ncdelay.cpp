// ncdelay.cpp - Command-line front end; see `ncdelay --help`.

#include "ncdelay/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return ncdelay::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
