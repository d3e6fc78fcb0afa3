// Writes a short synthetic OTB-style sequence and a small tracker config for
// the C API and command-line tests.
#include <cstdio>
#include <fstream>

#include "synthetic.hpp"

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <dir>\n", argv[0]);
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    synth::SequenceSpec spec;
    spec.frames = 5;
    spec.width = 100;
    spec.height = 80;
    synth::write_otb(dir / "seq", synth::generate(spec));
    std::ofstream(dir / "small.cfg") << "# quick settings\n"
                                        "particles = 16\n"
                                        "dictionary_samples = 16\n"
                                        "dictionary_size = 16\n"
                                        "negatives = 8\n"
                                        "update_rate = 2\n"
                                        "ranks = 3, 3, 2\n";
    std::filesystem::create_directories(dir / "bad" / "img");
    std::ofstream(dir / "bad" / "groundtruth_rect.txt") << "1,2,3,4\n";
    return 0;
}
