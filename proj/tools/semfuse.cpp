#include "semfuse/cli/app.hpp"

int main(int argc, char** argv) { return semfuse::cli::run(argc, argv); }
