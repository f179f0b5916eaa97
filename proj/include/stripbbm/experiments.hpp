#pragma once
namespace stripbbm { int cli_main(int argc, char** argv); }
