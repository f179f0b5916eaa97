#include "stripbbm/experiments.hpp"

int main(int argc, char** argv) { return stripbbm::cli_main(argc, argv); }
