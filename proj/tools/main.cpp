#include <cstdio>

#include "revsphere/version.hpp"

int main() {
  std::printf("revsphere %s\n", revsphere::version_string);
  return 0;
}
