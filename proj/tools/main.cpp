#include <cstdio>

int main() {
    std::puts("tofgr CLI: subcommands not wired up yet");
    return 1;
}
