// Regenerates the checked-in network and hardware config files.
#include <iostream>

#include "evitsim/graph_io.hpp"
#include "evitsim/hwconfig.hpp"

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "configs";
    evitsim::write_text_file(dir + "/efficientvit-b1.json",
                             evitsim::default_b1_topology_json());
    evitsim::write_text_file(dir + "/default-hw.json",
                             evitsim::save_hardware_config(evitsim::HardwareConfig{}));
    std::cout << "wrote " << dir << "/efficientvit-b1.json and " << dir
              << "/default-hw.json\n";
    return 0;
}
