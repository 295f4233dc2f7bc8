#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "gridcascade/network.hpp"

namespace gridcascade::testing {

std::filesystem::path data_path(const std::string& relative);

/// Small networks assembled in code. Bus numbers are id + 1, base 100 MVA.
class NetworkBuilder {
  public:
    int bus(BusKind kind, double v_mag = 1.0, double g_sh = 0.0, double b_sh = 0.0);
    int branch(int from, int to, double r, double x, double b_c = 0.0, double rating = 0.0);
    int generator(int bus, double p_mw, double p_max_mw, double q_mvar = 0.0);
    int load(int bus, double p_mw, double q_mvar = 0.0);
    PowerNetwork build() const { return net_; }
    PowerNetwork& network() { return net_; }

  private:
    PowerNetwork net_;
};

/// Slack (V = 1) feeding a PQ bus through x = 0.1; the load is given in p.u.
PowerNetwork two_bus(double p_load_pu, double q_load_pu);

/// Slack V=1.02, PV V=1.01 (0.6 gen, 0.2 load), PQ 0.9+j0.3 with shunt
/// 0.01+j0.05; three lossy lines with charging.
PowerNetwork three_bus();

/// Two areas {0,1} and {2,3} joined by branch 1 (bus 1 - bus 2). Area A has
/// the slack and a load, area B a load and optionally a generator.
PowerNetwork two_area(bool generator_in_b);

/// Random connected island with one slack, some PV buses, loads, shunts,
/// charging and occasional off-nominal taps.
PowerNetwork random_island(std::mt19937_64& rng, int n_buses);

}  // namespace gridcascade::testing
