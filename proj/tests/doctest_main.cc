#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "xlparse/common.h"

int main(int argc, char** argv) {
  xlparse::set_log_quiet(true);
  doctest::Context ctx;
  ctx.applyCommandLine(argc, argv);
  return ctx.run();
}
