// MATPOWER case reader/writer. Supported subset: mpc.baseMVA, mpc.bus,
// mpc.gen and mpc.branch. Any other mpc.* assignment is skipped.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "gridcascade/errors.hpp"
#include "gridcascade/network.hpp"

namespace gridcascade {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Row {
    int line = 0;
    std::vector<double> values;
};

struct Matrix {
    int line = 0;
    std::vector<Row> rows;
};

class Scanner {
  public:
    explicit Scanner(std::string_view text) : text_(text) {}

    [[nodiscard]] bool done() const { return pos_ >= text_.size(); }
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] char peek() const { return done() ? '\0' : text_[pos_]; }

    char get() {
        const char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void skip_comment() {
        while (!done() && peek() != '\n') get();
    }

    /// Skips blanks, comments and MATLAB line continuations; stops at newlines
    /// when `stop_at_newline` is set.
    void skip_space(bool stop_at_newline) {
        while (!done()) {
            const char c = peek();
            if (c == '%') {
                skip_comment();
            } else if (c == '.' && text_.substr(pos_, 3) == "...") {
                pos_ += 3;
                skip_comment();
                if (!done()) get();
            } else if (c == '\n' && stop_at_newline) {
                return;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                return;
            }
        }
    }

    std::string word() {
        std::string out;
        while (!done()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
                out.push_back(get());
            } else {
                break;
            }
        }
        return out;
    }

    double number() {
        const int at = line_;
        std::string token;
        while (!done()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
                token.push_back(get());
            } else {
                break;
            }
        }
        if (token.empty()) throw ParseError(at, std::string("expected a number near '") + peek() + "'");
        char* end = nullptr;
        const double value = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) throw ParseError(at, "invalid number '" + token + "'");
        return value;
    }

    /// Skips a value we do not interpret, up to and including its terminating ';'.
    void skip_value() {
        int depth = 0;
        bool in_string = false;
        while (!done()) {
            const char c = get();
            if (in_string) {
                if (c == '\'') in_string = false;
                continue;
            }
            if (c == '\'') {
                in_string = true;
            } else if (c == '%') {
                skip_comment();
            } else if (c == '[' || c == '{') {
                ++depth;
            } else if (c == ']' || c == '}') {
                --depth;
            } else if (c == ';' && depth <= 0) {
                return;
            } else if (c == '\n' && depth <= 0) {
                return;
            }
        }
    }

    Matrix matrix() {
        Matrix m{line_, {}};
        if (peek() != '[') throw ParseError(line_, "expected '['");
        get();
        Row row;
        auto finish_row = [&] {
            if (!row.values.empty()) m.rows.push_back(std::move(row));
            row = Row{};
        };
        while (true) {
            skip_space(true);
            if (done()) throw ParseError(m.line, "unterminated matrix");
            const char c = peek();
            if (c == ']') {
                get();
                finish_row();
                break;
            }
            if (c == ';' || c == '\n') {
                get();
                finish_row();
                continue;
            }
            if (c == ',') {
                get();
                continue;
            }
            if (row.values.empty()) row.line = line_;
            row.values.push_back(number());
        }
        skip_space(true);
        if (peek() == ';') get();
        return m;
    }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

void require_columns(const Matrix& m, std::size_t min_cols, const char* name) {
    for (const auto& row : m.rows) {
        if (row.values.size() < min_cols) {
            throw ParseError(row.line, std::string(name) + " row has " +
                                           std::to_string(row.values.size()) +
                                           " columns, need at least " + std::to_string(min_cols));
        }
    }
}

int as_int(double v, int line, const char* what) {
    if (v != std::floor(v)) throw ParseError(line, std::string(what) + " must be an integer");
    return static_cast<int>(v);
}

}  // namespace

PowerNetwork parse_case(std::string_view text, const CaseOptions& options) {
    Scanner scan(text);
    std::optional<double> base_mva;
    std::optional<Matrix> bus_m, gen_m, branch_m;

    while (true) {
        scan.skip_space(false);
        if (scan.done()) break;
        const int line = scan.line();
        const std::string name = scan.word();
        if (name.empty()) {
            throw ParseError(line, std::string("unexpected character '") + scan.peek() + "'");
        }
        if (name == "function") {
            scan.skip_comment();
            continue;
        }
        scan.skip_space(true);
        if (scan.peek() != '=') throw ParseError(line, "expected '=' after '" + name + "'");
        scan.get();
        scan.skip_space(true);

        if (name == "mpc.baseMVA") {
            base_mva = scan.number();
            scan.skip_value();
        } else if (name == "mpc.bus") {
            bus_m = scan.matrix();
        } else if (name == "mpc.gen") {
            gen_m = scan.matrix();
        } else if (name == "mpc.branch") {
            branch_m = scan.matrix();
        } else {
            scan.skip_value();
        }
    }

    if (!base_mva && !bus_m && !gen_m && !branch_m) throw ParseError(1, "empty case: no mpc tables found");
    if (!base_mva) throw ParseError(scan.line(), "missing mpc.baseMVA");
    if (!(*base_mva > 0.0)) throw ParseError(scan.line(), "mpc.baseMVA must be positive");
    if (!bus_m || bus_m->rows.empty()) throw ParseError(scan.line(), "missing or empty mpc.bus");
    if (!branch_m) throw ParseError(scan.line(), "missing mpc.branch");
    if (!gen_m) throw ParseError(scan.line(), "missing mpc.gen");
    require_columns(*bus_m, 9, "bus");
    require_columns(*gen_m, 10, "gen");
    require_columns(*branch_m, 11, "branch");

    PowerNetwork net;
    net.base_mva = *base_mva;
    const double base = net.base_mva;

    std::set<int> seen;
    for (const auto& row : bus_m->rows) {
        const auto& v = row.values;
        Bus bus;
        bus.id = static_cast<int>(net.buses.size());
        bus.number = as_int(v[0], row.line, "bus number");
        if (!seen.insert(bus.number).second) {
            throw ParseError(row.line, "duplicate bus number " + std::to_string(bus.number));
        }
        switch (as_int(v[1], row.line, "bus type")) {
            case 1: bus.kind = BusKind::pq; break;
            case 2: bus.kind = BusKind::pv; break;
            case 3: bus.kind = BusKind::slack; break;
            case 4:
                bus.kind = BusKind::pq;
                bus.in_service = false;
                break;
            default: throw ParseError(row.line, "bus type must be 1..4");
        }
        bus.g_sh = v[4] / base;
        bus.b_sh = v[5] / base;
        bus.v_mag = v[7];
        bus.v_ang = v[8] * kDegToRad;
        if (v[2] != 0.0 || v[3] != 0.0) net.loads.push_back(Load{bus.id, v[2], v[3], 1.0});
        net.buses.push_back(bus);
    }

    auto bus_ref = [&](double number, int line) {
        const auto id = net.find_bus(as_int(number, line, "bus reference"));
        if (!id) throw ParseError(line, "reference to unknown bus " + std::to_string(static_cast<long long>(number)));
        return *id;
    };

    std::vector<bool> voltage_set(net.buses.size(), false);
    for (const auto& row : gen_m->rows) {
        const auto& v = row.values;
        Generator gen;
        gen.bus = bus_ref(v[0], row.line);
        gen.p_set = v[1];
        gen.q_set = v[2];
        gen.in_service = v[7] > 0.0 && net.buses[gen.bus].in_service;
        gen.p_max = v[8];
        gen.p_min = v[9];
        auto& bus = net.buses[gen.bus];
        if (gen.in_service && bus.kind != BusKind::pq && !voltage_set[gen.bus]) {
            bus.v_mag = v[5];
            voltage_set[gen.bus] = true;
        }
        net.generators.push_back(gen);
    }

    for (const auto& row : branch_m->rows) {
        const auto& v = row.values;
        Branch br;
        br.id = static_cast<int>(net.branches.size());
        br.from_bus = bus_ref(v[0], row.line);
        br.to_bus = bus_ref(v[1], row.line);
        if (br.from_bus == br.to_bus) throw ParseError(row.line, "branch connects a bus to itself");
        br.r = v[2];
        br.x = v[3];
        if (br.r == 0.0 && br.x == 0.0) throw ParseError(row.line, "zero-impedance branch (r = x = 0)");
        const auto y = branch_admittance(br.r, br.x);
        br.g = y.g;
        br.b = y.b;
        br.b_c = v[4];
        br.rating = v[5];
        br.tap = v[8] == 0.0 ? 1.0 : v[8];
        br.shift = v[9] * kDegToRad;
        if (!options.allow_taps && (br.tap != 1.0 || br.shift != 0.0)) {
            throw ParseError(row.line, "off-nominal tap or phase shift present but tap support is disabled");
        }
        br.in_service = v[10] > 0.0 && net.buses[br.from_bus].in_service &&
                        net.buses[br.to_bus].in_service;
        net.branches.push_back(br);
    }
    return net;
}

PowerNetwork load_case(const std::filesystem::path& path, const CaseOptions& options) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open case file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_case(buffer.str(), options);
    } catch (const ParseError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

namespace {

// A value near `guess` that the parser maps back to exactly `target`, so that
// unit conversions survive a write/read cycle bit for bit.
template <class Forward>
double preimage(double target, double guess, Forward forward) {
    if (!std::isfinite(guess)) return guess;
    double up = guess, down = guess;
    for (int step = 0; step < 64; ++step) {
        if (forward(up) == target) return up;
        if (forward(down) == target) return down;
        up = std::nextafter(up, std::numeric_limits<double>::infinity());
        down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    }
    return guess;
}

}  // namespace

std::string serialize_case(const PowerNetwork& network, std::string_view name) {
    std::ostringstream out;
    out.precision(17);
    const double base = network.base_mva;
    constexpr double kRadToDeg = 180.0 / std::numbers::pi;
    const auto degrees = [](double rad) {
        return preimage(rad, rad * kRadToDeg, [](double deg) { return deg * kDegToRad; });
    };
    const auto on_base = [base](double pu) {
        return preimage(pu, pu * base, [base](double raw) { return raw / base; });
    };

    std::vector<double> pd(network.buses.size(), 0.0), qd(network.buses.size(), 0.0);
    for (const auto& load : network.loads) {
        pd[load.bus] += load.p;
        qd[load.bus] += load.q;
    }

    out << "function mpc = " << name << "\n";
    out << "mpc.version = '2';\n";
    out << "mpc.baseMVA = " << base << ";\n\n";

    out << "%% bus_i type Pd Qd Gs Bs area Vm Va baseKV zone Vmax Vmin\n";
    out << "mpc.bus = [\n";
    for (const auto& bus : network.buses) {
        int type = 1;
        if (!bus.in_service) {
            type = 4;
        } else if (bus.kind == BusKind::pv) {
            type = 2;
        } else if (bus.kind == BusKind::slack) {
            type = 3;
        }
        out << '\t' << bus.number << '\t' << type << '\t' << pd[bus.id] << '\t' << qd[bus.id] << '\t'
            << on_base(bus.g_sh) << '\t' << on_base(bus.b_sh) << "\t1\t" << bus.v_mag << '\t'
            << degrees(bus.v_ang) << "\t0\t1\t1.1\t0.9;\n";
    }
    out << "];\n\n";

    out << "%% bus Pg Qg Qmax Qmin Vg mBase status Pmax Pmin\n";
    out << "mpc.gen = [\n";
    for (const auto& gen : network.generators) {
        const auto& bus = network.buses[gen.bus];
        out << '\t' << bus.number << '\t' << gen.p_set << '\t' << gen.q_set << "\t9999\t-9999\t"
            << bus.v_mag << '\t' << base << '\t' << (gen.in_service ? 1 : 0) << '\t' << gen.p_max
            << '\t' << gen.p_min << ";\n";
    }
    out << "];\n\n";

    out << "%% fbus tbus r x b rateA rateB rateC ratio angle status angmin angmax\n";
    out << "mpc.branch = [\n";
    for (const auto& br : network.branches) {
        out << '\t' << network.buses[br.from_bus].number << '\t' << network.buses[br.to_bus].number
            << '\t' << br.r << '\t' << br.x << '\t' << br.b_c << '\t' << br.rating << "\t0\t0\t"
            << (br.tap == 1.0 ? 0.0 : br.tap) << '\t' << degrees(br.shift) << '\t'
            << (br.in_service ? 1 : 0) << "\t-360\t360;\n";
    }
    out << "];\n";
    return out.str();
}

}  // namespace gridcascade
