#include "hypcert/cli/dispatch.hpp"

int main(int argc, char** argv) { return hypcert::cli::run(argc, argv); }
