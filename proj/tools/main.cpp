#include "commands.h"

#include <iostream>

int main(int argc, char** argv) {
    return spectra_lab::cli::run(argc, argv, std::cout, std::cerr);
}
