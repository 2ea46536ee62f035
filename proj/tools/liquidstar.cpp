#include "liquidstar/cli.hpp"

int main(int argc, char** argv) {
    return liquidstar::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
