// Command-line front end: emits the curve, bound, zone and simulation data
// as CSV or JSON.  Data go to --out (or standard output); every file written
// with --out gets a <file>.manifest.json sidecar recording the exact
// parameters, so a rerun with the same manifest reproduces the bytes.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "steerkit/steerkit.hpp"

namespace {

using namespace steerkit;

constexpr int exit_usage = 2;
constexpr int exit_io = 3;

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// Angle strings: plain number = radians; `deg`/`rad` suffix selects the
// unit; `pi` alone or as a trailing multiplier is exact.
double parse_angle(std::string text, const std::string& flag) {
    auto fail = [&] {
        throw usage_error("flag " + flag + ": cannot parse angle '" + text + "'");
    };
    // trim
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.erase(text.begin());
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    if (text.empty()) fail();

    double scale = 1.0;
    if (text.size() >= 3 && text.substr(text.size() - 3) == "deg") {
        scale = pi / 180.0;
        text = text.substr(0, text.size() - 3);
    } else if (text.size() >= 3 && text.substr(text.size() - 3) == "rad") {
        text = text.substr(0, text.size() - 3);
    } else if (text.size() >= 2 && text.substr(text.size() - 2) == "pi") {
        scale = pi;
        text = text.substr(0, text.size() - 2);
        if (text.empty() || text == "-" || text == "+") text += "1";
    }
    if (text.empty()) fail();
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        fail();
    }
    if (used != text.size()) fail();
    return value * scale;
}

// Inclusive sweep `start:stop:count`; with angles=true each endpoint goes
// through the angle parser.
std::vector<double> parse_sweep(const std::string& text, const std::string& flag,
                                bool angles = false) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 3)
        throw usage_error("flag " + flag + ": sweep must be start:stop:count, got '" + text + "'");
    auto num = [&](const std::string& s) {
        if (angles) return parse_angle(s, flag);
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw usage_error("flag " + flag + ": cannot parse '" + s + "'");
        }
    };
    const double start = num(parts[0]);
    const double stop = num(parts[1]);
    int count = 0;
    try {
        count = std::stoi(parts[2]);
    } catch (const std::exception&) {
        throw usage_error("flag " + flag + ": count must be an integer");
    }
    if (count < 1) throw usage_error("flag " + flag + ": count must be >= 1");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        grid.push_back(start);
        return grid;
    }
    for (int i = 0; i < count; ++i)
        grid.push_back(start + (stop - start) * i / (count - 1));
    return grid;
}

core::StateParams make_state(double alpha, double p, double eta, double phi) {
    try {
        return core::StateParams{alpha, p, eta, phi};
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string("invalid state parameters: ") + e.what());
    }
}

// Tabular results; a missing value (unreachable threshold) renders as an
// empty CSV cell and a JSON null.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;
};

std::string render_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) out += ',';
        out += t.header[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (row[i]) out += fmt9(*row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Table& t) {
    std::string out = "[\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out += "  {";
        for (std::size_t i = 0; i < t.rows[r].size(); ++i) {
            if (i) out += ", ";
            out += '"' + t.header[i] + "\": ";
            out += t.rows[r][i] ? fmt9(*t.rows[r][i]) : "null";
        }
        out += r + 1 < t.rows.size() ? "},\n" : "}\n";
    }
    out += "]\n";
    return out;
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string render_manifest(const std::string& command,
                            const std::vector<std::pair<std::string, std::string>>& params,
                            std::uint64_t seed) {
    std::string out = "{\n";
    out += "  \"command\": \"" + json_escape(command) + "\",\n";
    out += "  \"parameters\": {";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ", ";
        out += '"' + json_escape(params[i].first) + "\": \"" + json_escape(params[i].second) +
               '"';
    }
    out += "},\n";
    out += "  \"seed\": " + std::to_string(seed) + ",\n";
    out += std::string("  \"tool_version\": \"") + version + "\",\n";
    out += "  \"timestamp\": \"" + iso_timestamp() + "\"\n";
    out += "}\n";
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    f << content;
    if (!f.good()) throw std::ios_base::failure("write to '" + path + "' failed");
}

// Emits the table (and, for file output, the manifest sidecar).
void emit(const Table& t, const std::string& format, const std::string& out_path,
          const std::string& command,
          const std::vector<std::pair<std::string, std::string>>& params, std::uint64_t seed) {
    const std::string body = format == "json" ? render_json(t) : render_csv(t);
    if (out_path.empty()) {
        std::cout << body;
        return;
    }
    write_file(out_path, body);
    write_file(out_path + ".manifest.json", render_manifest(command, params, seed));
}

std::string zone_label(double s_value, const steering::Result& f1, const steering::Result& f2) {
    const bool steered = f1.violates || f2.violates;
    if (s_value > 2.0) return steered ? "bell-nonlocal" : "grey-violation";
    if (f1.violates) return "steerable-I";
    if (f2.violates) return "steerable-II";
    return "undetected";
}

// ---- subcommand payloads ------------------------------------------------

struct CommonFlags {
    double alpha = 0.5;
    double p = 1.0;
    double eta = 1.0;
    std::string phi = "0";
    std::string grid;
    std::string format = "csv";
    std::string out;
};

int cmd_state(const CommonFlags& c) {
    const core::StateParams s = make_state(c.alpha, c.p, c.eta, parse_angle(c.phi, "--phi"));
    const auto rho = core::build_state(s);
    const auto vis = core::visibilities(s);
    const double conc = core::concurrence(s);

    if (c.format == "json") {
        std::string out = "{\n  \"alpha\": " + fmt9(s.alpha) + ", \"p\": " + fmt9(s.p) +
                          ", \"eta\": " + fmt9(s.eta) + ", \"phi\": " + fmt9(s.phi) + ",\n";
        out += "  \"density_matrix\": [";
        for (int i = 0; i < 4; ++i) {
            out += i ? ", [" : "[";
            for (int j = 0; j < 4; ++j) {
                if (j) out += ", ";
                out += "[" + fmt9(rho.at(i, j).real()) + ", " + fmt9(rho.at(i, j).imag()) + "]";
            }
            out += "]";
        }
        out += "],\n";
        out += "  \"concurrence\": " + fmt9(conc) + ", \"v_z\": " + fmt9(vis.vz) +
               ", \"v_x\": " + fmt9(vis.vx) + ",\n";
        out += "  \"interference_amplitude\": " + fmt9(core::interference_amplitude(s)) + "\n}\n";
        if (c.out.empty())
            std::cout << out;
        else {
            write_file(c.out, out);
            write_file(c.out + ".manifest.json",
                       render_manifest("state",
                                       {{"alpha", fmt9(s.alpha)},
                                        {"p", fmt9(s.p)},
                                        {"eta", fmt9(s.eta)},
                                        {"phi", fmt9(s.phi)},
                                        {"format", c.format}},
                                       0));
        }
        return 0;
    }

    std::printf("state: alpha=%s p=%s eta=%s phi=%s\n", fmt9(s.alpha).c_str(),
                fmt9(s.p).c_str(), fmt9(s.eta).c_str(), fmt9(s.phi).c_str());
    std::printf("density matrix:\n");
    for (int i = 0; i < 4; ++i) {
        std::printf(" ");
        for (int j = 0; j < 4; ++j)
            std::printf(" %12.9f%+12.9fi", rho.at(i, j).real(), rho.at(i, j).imag());
        std::printf("\n");
    }
    std::printf("concurrence: %s\n", fmt9(conc).c_str());
    std::printf("visibilities: V_z=%s V_x=%s\n", fmt9(vis.vz).c_str(), fmt9(vis.vx).c_str());
    return 0;
}

int cmd_bounds(const CommonFlags& c, const std::string& kinds_csv, const std::string& eta_grid) {
    if (!eta_grid.empty() && c.eta != 1.0)
        throw usage_error("--eta and --eta-grid are mutually exclusive");

    std::vector<std::pair<std::string, bounds::Kind>> all = {
        {"p_entanglement", bounds::Kind::entanglement},
        {"p_steering_II", bounds::Kind::steering_II},
        {"p_steering_I", bounds::Kind::steering_I},
        {"p_chsh", bounds::Kind::chsh}};
    std::vector<std::pair<std::string, bounds::Kind>> kinds;
    if (kinds_csv == "all") {
        kinds = all;
    } else {
        std::stringstream ss(kinds_csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            bool found = false;
            for (const auto& k : all)
                if (("p_" + item) == k.first) {
                    kinds.push_back(k);
                    found = true;
                    break;
                }
            if (!found)
                throw usage_error("flag --kinds: unknown kind '" + item +
                                  "' (expected entanglement, steering_II, steering_I, chsh)");
        }
        if (kinds.empty()) throw usage_error("flag --kinds: at least one kind is required");
    }

    const std::string grid_spec = c.grid.empty() ? "0:1:201" : c.grid;
    const auto alphas = parse_sweep(grid_spec, "--grid");
    std::vector<double> etas;
    if (eta_grid.empty())
        etas.push_back(c.eta);
    else
        etas = parse_sweep(eta_grid, "--eta-grid");

    Table t;
    if (!eta_grid.empty()) t.header.push_back("eta");
    t.header.push_back("alpha");
    for (const auto& k : kinds) t.header.push_back(k.first);

    for (double eta : etas)
        for (double alpha : alphas) {
            std::vector<std::optional<double>> row;
            if (!eta_grid.empty()) row.emplace_back(eta);
            row.emplace_back(alpha);
            for (const auto& k : kinds) {
                try {
                    row.push_back(bounds::p_threshold(k.second, alpha, eta));
                } catch (const std::invalid_argument& e) {
                    throw usage_error(std::string("invalid parameter: ") + e.what());
                }
            }
            t.rows.push_back(std::move(row));
        }

    emit(t, c.format, c.out, "bounds",
         {{"eta", eta_grid.empty() ? fmt9(c.eta) : std::string("-")},
          {"eta-grid", eta_grid.empty() ? std::string("-") : eta_grid},
          {"grid", grid_spec},
          {"kinds", kinds_csv},
          {"format", c.format}},
         0);
    return 0;
}

int cmd_curves(const CommonFlags& c) {
    const double phi = parse_angle(c.phi, "--phi");
    const std::string grid_spec = c.grid.empty() ? "0:1:201" : c.grid;
    const auto alphas = parse_sweep(grid_spec, "--grid");

    Table t;
    t.header = {"alpha",     "s_value",   "f_I",      "f_II",      "theta_b",
                "theta_b_prime", "theta_s_I", "theta_t_I", "theta_s_II", "theta_t_II"};
    for (double alpha : alphas) {
        const auto s = make_state(alpha, c.p, c.eta, phi);
        const auto bell = chsh::maximize(s);
        const auto f1 = steering::scenario_I(s);
        const auto f2 = steering::scenario_II(s);
        t.rows.push_back({alpha, bell.s_value, f1.f_value, f2.f_value, bell.settings.b.theta,
                          bell.settings.b_prime.theta, f1.settings.s_setting.theta,
                          f1.settings.t_setting.theta, f2.settings.s_setting.theta,
                          f2.settings.t_setting.theta});
    }

    emit(t, c.format, c.out, "curves",
         {{"p", fmt9(c.p)},
          {"eta", fmt9(c.eta)},
          {"phi", fmt9(phi)},
          {"grid", grid_spec},
          {"format", c.format}},
         0);
    return 0;
}

int cmd_zones(const CommonFlags& c) {
    const double phi = parse_angle(c.phi, "--phi");
    const std::string grid_spec = c.grid.empty() ? "0:1:201" : c.grid;
    const auto alphas = parse_sweep(grid_spec, "--grid");

    // zone is categorical, so the table is rendered by hand
    std::string csv = "alpha,s_value,f_I,f_II,zone\n";
    std::string json = "[\n";
    int grey = 0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const auto s = make_state(alphas[i], c.p, c.eta, phi);
        const double bell = chsh::max_value(s);
        const auto f1 = steering::scenario_I(s);
        const auto f2 = steering::scenario_II(s);
        const std::string zone = zone_label(bell, f1, f2);
        if (zone == "grey-violation") ++grey;
        csv += fmt9(alphas[i]) + ',' + fmt9(bell) + ',' + fmt9(f1.f_value) + ',' +
               fmt9(f2.f_value) + ',' + zone + '\n';
        json += "  {\"alpha\": " + fmt9(alphas[i]) + ", \"s_value\": " + fmt9(bell) +
                ", \"f_I\": " + fmt9(f1.f_value) + ", \"f_II\": " + fmt9(f2.f_value) +
                ", \"zone\": \"" + zone + "\"}";
        json += i + 1 < alphas.size() ? ",\n" : "\n";
    }
    json += "]\n";
    if (grey > 0)
        std::cerr << "warning: " << grey
                  << " point(s) are Bell non-local yet undetected by either steering scenario "
                     "(grey-violation)\n";

    const std::string body = c.format == "json" ? json : csv;
    if (c.out.empty()) {
        std::cout << body;
    } else {
        write_file(c.out, body);
        write_file(c.out + ".manifest.json",
                   render_manifest("zones",
                                   {{"p", fmt9(c.p)},
                                    {"eta", fmt9(c.eta)},
                                    {"phi", fmt9(phi)},
                                    {"grid", grid_spec},
                                    {"format", c.format}},
                                   0));
    }
    return 0;
}

struct SimulateFlags {
    std::string chi;  // sweep over the wave-plate angle
    double counts = 5500.0;
    std::uint64_t seed = 0;
    std::string scenario = "both";
};

int cmd_simulate(const CommonFlags& c, const SimulateFlags& f) {
    const double phi = parse_angle(c.phi, "--phi");
    if (std::abs(phi) > 1e-9 && std::abs(phi - pi) > 1e-9)
        throw usage_error(
            "flag --phi: the coincidence simulation covers the polarizer plane only "
            "(phi = 0 or pi)");
    if (!f.chi.empty() && !c.grid.empty())
        throw usage_error("--chi and --grid are mutually exclusive sweeps");
    if (f.scenario != "I" && f.scenario != "II" && f.scenario != "both")
        throw usage_error("flag --scenario: expected I, II or both");

    std::vector<double> chis;
    std::vector<double> alphas;
    if (!f.chi.empty()) {
        chis = parse_sweep(f.chi, "--chi", true);
        for (double chi : chis) alphas.push_back(core::hwp_to_alpha(chi));
    } else {
        alphas = parse_sweep(c.grid.empty() ? "0.02:0.98:21" : c.grid, "--grid");
    }

    const bool do_I = f.scenario != "II";
    const bool do_II = f.scenario != "I";

    Table t;
    if (!chis.empty()) t.header.push_back("chi");
    t.header.push_back("alpha");
    auto block = [&](const std::string& q) {
        t.header.push_back(q + "_est");
        t.header.push_back(q + "_sigma");
        t.header.push_back(q + "_exact");
        t.header.push_back(q + "_residual");
    };
    block("vz");
    block("vx");
    block("s");
    if (do_I) block("f_I");
    if (do_II) block("f_II");

    sim::Config cfg;
    cfg.mean_total_counts = f.counts;

    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const auto s = make_state(alphas[i], c.p, c.eta, phi);
        const std::uint64_t point_seed = sim::derive_seed(f.seed, i);
        int stream = 0;
        auto next_cfg = [&] {
            sim::Config one = cfg;
            one.seed = sim::derive_seed(point_seed, static_cast<std::uint64_t>(stream++));
            return one;
        };

        std::vector<std::optional<double>> row;
        if (!chis.empty()) row.emplace_back(chis[i]);
        row.emplace_back(alphas[i]);

        auto push = [&](const sim::Estimate& est, double exact) {
            row.emplace_back(est.value);
            row.emplace_back(est.sigma);
            row.emplace_back(exact);
            row.emplace_back(est.value - exact);
        };

        const auto vis = core::visibilities(s);
        const auto cz = sim::simulate_counts(s, core::sigma_z_setting, core::sigma_z_setting,
                                             next_cfg());
        push(sim::estimate_visibility(cz), vis.vz);
        const auto cx = sim::simulate_counts(s, core::sigma_x_setting, core::sigma_x_setting,
                                             next_cfg());
        push(sim::estimate_visibility(cx), vis.vx);

        const auto bell = chsh::maximize(s);
        const auto ab = sim::simulate_counts(s, bell.settings.a, bell.settings.b, next_cfg());
        const auto abp = sim::simulate_counts(s, bell.settings.a, bell.settings.b_prime,
                                              next_cfg());
        const auto apb = sim::simulate_counts(s, bell.settings.a_prime, bell.settings.b,
                                              next_cfg());
        const auto apbp = sim::simulate_counts(s, bell.settings.a_prime, bell.settings.b_prime,
                                               next_cfg());
        push(sim::estimate_chsh(ab, abp, apb, apbp), bell.s_value);

        auto steer_block = [&](const steering::Result& r) {
            const auto with_p = sim::simulate_counts(s, r.settings.s_setting,
                                                     r.settings.p_setting, next_cfg());
            const auto with_q = sim::simulate_counts(s, r.settings.t_setting,
                                                     r.settings.q_setting, next_cfg());
            push(sim::estimate_steering(with_p, with_q).estimate, r.f_value);
        };
        if (do_I) steer_block(steering::scenario_I(s));
        if (do_II) steer_block(steering::scenario_II(s));

        t.rows.push_back(std::move(row));
    }

    emit(t, c.format, c.out, "simulate",
         {{"p", fmt9(c.p)},
          {"eta", fmt9(c.eta)},
          {"phi", fmt9(phi)},
          {"chi", f.chi.empty() ? std::string("-") : f.chi},
          {"grid", f.chi.empty() ? (c.grid.empty() ? "0.02:0.98:21" : c.grid) : std::string("-")},
          {"counts", fmt9(f.counts)},
          {"scenario", f.scenario},
          {"format", c.format}},
         f.seed);
    return 0;
}

int cmd_keyrate(const CommonFlags& c, double f_flag, bool f_given) {
    double f_value = f_flag;
    if (!f_given) {
        const auto s = make_state(c.alpha, c.p, c.eta, parse_angle(c.phi, "--phi"));
        f_value = steering::scenario_I(s).f_value;
        std::printf("f_I: %s\n", fmt9(f_value).c_str());
    }
    double rate = 0.0;
    try {
        rate = steering::keyrate(f_value);
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string("flag --f: ") + e.what());
    }
    std::printf("keyrate: %s\n", fmt9(rate).c_str());
    std::printf("positive: %s\n", rate > 0.0 ? "yes" : "no");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-qubit steering / Bell toolbox"};
    app.require_subcommand(1);

    CommonFlags c;
    SimulateFlags simf;
    std::string kinds = "all";
    std::string eta_grid;
    double f_flag = 0.0;

    auto add_common = [&](CLI::App* sub, bool with_state = true) {
        if (with_state) {
            sub->add_option("--alpha", c.alpha, "weight of |00> in the pure pair");
            sub->add_option("--p", c.p, "mixing weight against white noise");
            sub->add_option("--eta", c.eta, "phase-mixing weight");
            sub->add_option("--phi", c.phi, "relative phase (number, 'pi', deg/rad suffix)");
        }
        sub->add_option("--grid", c.grid, "alpha sweep start:stop:count");
        sub->add_option("--format", c.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", c.out, "output file (default: stdout)");
    };

    auto* st = app.add_subcommand("state", "density matrix, concurrence and visibilities");
    add_common(st);

    auto* bd = app.add_subcommand("bounds", "threshold curves p(alpha) for the hierarchy");
    add_common(bd);
    bd->add_option("--kinds", kinds,
                   "comma list of entanglement,steering_II,steering_I,chsh (default all)");
    bd->add_option("--eta-grid", eta_grid, "eta sweep start:stop:count (adds an eta column)");

    auto* cv = app.add_subcommand("curves", "exact S, F_I, F_II and optimal angles vs alpha");
    add_common(cv);

    auto* zn = app.add_subcommand("zones", "correlation-strength zone labels vs alpha");
    add_common(zn);

    auto* sm = app.add_subcommand("simulate",
                                  "Monte Carlo coincidence counts with estimates and sigmas");
    add_common(sm);
    sm->add_option("--chi", simf.chi, "wave-plate angle sweep start:stop:count (angle units)");
    sm->add_option("--counts", simf.counts, "mean total coincidences per setting pair");
    sm->add_option("--seed", simf.seed, "master seed (derives one stream per draw)");
    sm->add_option("--scenario", simf.scenario, "steering scenario: I, II or both");

    auto* kr = app.add_subcommand("keyrate", "one-sided device-independent key rate");
    add_common(kr);
    auto* fopt = kr->add_option("--f", f_flag, "scenario-I steering value (otherwise computed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (st->parsed()) return cmd_state(c);
        if (bd->parsed()) return cmd_bounds(c, kinds, eta_grid);
        if (cv->parsed()) return cmd_curves(c);
        if (zn->parsed()) return cmd_zones(c);
        if (sm->parsed()) return cmd_simulate(c, simf);
        if (kr->parsed()) return cmd_keyrate(c, f_flag, fopt->count() > 0);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
