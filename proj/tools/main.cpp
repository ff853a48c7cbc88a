#include <cstdio>

int main() {
  std::puts("mocap: commands land here once the pipeline modules are in");
  return 0;
}
