#include "cli.hpp"

int main(int argc, char** argv) {
    return ddradar::cli::run(argc, argv);
}
