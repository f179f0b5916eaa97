#include "stripbbm/experiments.hpp"
namespace stripbbm { int cli_main(int, char**) { return 0; } }
