#include "gridcascade/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gridcascade/errors.hpp"

namespace gridcascade {

std::optional<int> PowerNetwork::find_bus(int number) const {
    for (const auto& bus : buses) {
        if (bus.number == number) return bus.id;
    }
    return std::nullopt;
}

int PowerNetwork::in_service_bus_count() const {
    return static_cast<int>(std::ranges::count_if(buses, [](const Bus& b) { return b.in_service; }));
}

int PowerNetwork::in_service_branch_count() const {
    return static_cast<int>(
        std::ranges::count_if(branches, [](const Branch& b) { return b.in_service; }));
}

double PowerNetwork::nominal_load_mw() const {
    double total = 0.0;
    for (const auto& load : loads) {
        if (buses[load.bus].in_service) total += load.p;
    }
    return total;
}

double PowerNetwork::served_load_mw() const {
    double total = 0.0;
    for (const auto& load : loads) {
        if (buses[load.bus].in_service) total += load.scale * load.p;
    }
    return total;
}

void PowerNetwork::take_bus_out(int bus_id) {
    buses.at(bus_id).in_service = false;
    for (auto& branch : branches) {
        if (branch.from_bus == bus_id || branch.to_bus == bus_id) branch.in_service = false;
    }
    for (auto& gen : generators) {
        if (gen.bus == bus_id) gen.in_service = false;
    }
}

void PowerNetwork::take_branch_out(int branch_id) { branches.at(branch_id).in_service = false; }

Admittance branch_admittance(double r, double x) {
    const double denom = r * r + x * x;
    if (denom == 0.0) throw InputError("zero-impedance branch (r = x = 0)");
    return {r / denom, -x / denom};
}

PowerNetwork normalize_ratings(PowerNetwork network, std::span<const double> base_flow_mva,
                               const RatingOptions& options) {
    if (base_flow_mva.size() != network.branches.size()) {
        throw std::invalid_argument("normalize_ratings: one base flow per branch required");
    }
    for (auto& branch : network.branches) {
        if (branch.rating > 0.0) continue;
        const double flow = std::abs(base_flow_mva[static_cast<std::size_t>(branch.id)]);
        branch.rating = std::max(options.alpha * flow, options.floor_mva);
    }
    return network;
}

std::vector<LabeledPoint> read_coordinates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open coordinates file " + path.string());
    std::vector<LabeledPoint> points;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        LabeledPoint p;
        if (!(fields >> p.label >> p.at.x >> p.at.y)) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 'id x y'");
        }
        points.push_back(p);
    }
    return points;
}

}  // namespace gridcascade
