// Command-line driver. Subcommands are wired in as the pipeline lands;
// usage errors and unreadable inputs exit with code 3.
#include <cstdio>

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::fprintf(stderr, "ebv: no subcommand given\n");
  return 3;
}
