#include "cli.hpp"

int main(int argc, char** argv) { return roadtrace::cli::dispatch(argc, argv); }
