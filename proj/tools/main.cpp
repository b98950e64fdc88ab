#include "cantor_dpp/cli.hpp"

int main(int argc, char** argv) { return cantor_dpp::cli::run(argc, argv); }
