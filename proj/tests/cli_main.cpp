#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <string>
#include <vector>

std::string g_cli_path;  // set via --cli <path>, consumed before doctest parses

int main(int argc, char** argv) {
    std::vector<char*> args;
    for (int i = 0; i < argc; ++i) {
        if (std::string(argv[i]) == "--cli" && i + 1 < argc) {
            g_cli_path = argv[++i];
            continue;
        }
        args.push_back(argv[i]);
    }
    doctest::Context context(static_cast<int>(args.size()), args.data());
    return context.run();
}
