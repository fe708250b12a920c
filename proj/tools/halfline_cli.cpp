#include <halfline/cli.hpp>

#include "halfline_schemas.hpp"

int main(int argc, char** argv) {
    return halfline::cli::run(argc, argv, halfline_schemas::lookup);
}
