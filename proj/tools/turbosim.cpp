#include "turbo/cli.hpp"

int main(int argc, char** argv)
{
    return turbo::cli::run(argc, argv);
}
