#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gridcascade {

enum class BusKind { slack, pv, pq };

/// A bus of the power network. `id` is the position in PowerNetwork::buses;
/// `number` is the label used by the case file.
struct Bus {
    int id = 0;
    int number = 0;
    BusKind kind = BusKind::pq;
    double v_mag = 1.0;  // p.u.; setpoint for slack/PV buses
    double v_ang = 0.0;  // rad
    double g_sh = 0.0;   // p.u. shunt conductance
    double b_sh = 0.0;   // p.u. shunt susceptance
    bool in_service = true;
};

/// Pi-model branch. Endpoints are bus ids (positions). Series admittance
/// g + jb = 1 / (r + jx); b_c is the total charging susceptance. Transformers
/// carry an off-nominal ratio `tap` on the from side and a phase `shift`.
struct Branch {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double g = 0.0;
    double b = 0.0;
    double b_c = 0.0;
    double tap = 1.0;
    double shift = 0.0;   // rad
    double rating = 0.0;  // MVA, 0 = not given
    bool in_service = true;
};

struct Generator {
    int bus = 0;
    double p_set = 0.0;  // MW
    double q_set = 0.0;  // MVAr
    double p_max = 0.0;  // MW
    double p_min = 0.0;  // MW
    bool in_service = true;
};

/// Constant-power demand; the effective demand is (scale * p, scale * q).
struct Load {
    int bus = 0;
    double p = 0.0;  // MW
    double q = 0.0;  // MVAr
    double scale = 1.0;
};

struct PowerNetwork {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::vector<Load> loads;
    double base_mva = 100.0;

    /// Bus id for a case-file bus number.
    [[nodiscard]] std::optional<int> find_bus(int number) const;

    [[nodiscard]] int in_service_bus_count() const;
    [[nodiscard]] int in_service_branch_count() const;

    /// Sum of nominal active demand on in-service buses (MW), ignoring scale.
    [[nodiscard]] double nominal_load_mw() const;
    /// Sum of scale * P_d on in-service buses (MW).
    [[nodiscard]] double served_load_mw() const;

    /// Takes a bus out of service together with its incident branches and generators.
    void take_bus_out(int bus_id);
    void take_branch_out(int branch_id);
};

struct CaseOptions {
    /// When false, transformers with tap != 1 or a phase shift are rejected.
    bool allow_taps = true;
};

/// Parses MATPOWER case text (baseMVA, bus, gen and branch matrices).
/// Throws ParseError on malformed input.
PowerNetwork parse_case(std::string_view text, const CaseOptions& options = {});

PowerNetwork load_case(const std::filesystem::path& path, const CaseOptions& options = {});

/// Writes the network back as MATPOWER case text.
std::string serialize_case(const PowerNetwork& network, std::string_view name = "mpc_case");

struct Admittance {
    double g = 0.0;
    double b = 0.0;
};

/// Series admittance 1 / (r + jx). Throws InputError when r = x = 0.
Admittance branch_admittance(double r, double x);

struct RatingOptions {
    double alpha = 1.2;
    double floor_mva = 5.0;
};

/// Fills missing (<= 0) ratings with alpha * base-case flow, floored at
/// `floor_mva`. `base_flow_mva[k]` is max(|S_lm|, |S_ml|) of branch k in MVA.
PowerNetwork normalize_ratings(PowerNetwork network, std::span<const double> base_flow_mva,
                               const RatingOptions& options = {});

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct LabeledPoint {
    int label = 0;
    Point at;
};

/// Reads `label x y` lines; blank lines and lines starting with '#' are skipped.
std::vector<LabeledPoint> read_coordinates(const std::filesystem::path& path);

}  // namespace gridcascade
