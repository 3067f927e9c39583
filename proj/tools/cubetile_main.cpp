// cubetile command line: tile priorities, ladder fitting, rate adaptation,
// session simulation, SI/TI analysis, and the storage model. All data goes
// to CSV (stdout or --out files); diagnostics go to stderr. Exit codes:
// 0 ok, 1 usage error, 2 data/invariant error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cubetile/cubetile.hpp"

namespace {

constexpr const char* kVersion = "cubetile 0.1.0";
constexpr const char* kConfigEnv = "CUBETILE_CONFIG";
constexpr const char* kConfigDefaultPath = "cubetile.conf";

struct CliConfig {
    std::string layout = "tiled_cubemap_1";
    std::vector<double> ladder_targets = {38.0, 39.0, 40.0, 42.0, 45.0, 48.0};
    double sigma_step = 0.1;
    int q_max = 5;
    std::vector<double> bandwidth_profiles = {2e6, 4e6, 10e6};
};

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& field : cubetile::csv::split(s))
        out.push_back(cubetile::csv::parse_double(field, what));
    return out;
}

// Optional key=value config file; flags override file, file overrides
// built-ins. The path comes from $CUBETILE_CONFIG, else ./cubetile.conf.
CliConfig load_config() {
    CliConfig cfg;
    std::string path = kConfigDefaultPath;
    bool required = false;
    if (const char* env = std::getenv(kConfigEnv); env && *env) {
        path = env;
        required = true;
    }
    std::ifstream in(path);
    if (!in) {
        if (required) throw cubetile::data_error("config file not found: " + path);
        return cfg;
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto sv = cubetile::csv::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw cubetile::data_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key(cubetile::csv::trim(sv.substr(0, eq)));
        const std::string value(cubetile::csv::trim(sv.substr(eq + 1)));
        try {
            if (key == "layout") cfg.layout = value;
            else if (key == "ladder_targets") cfg.ladder_targets = parse_double_list(value, "ladder target");
            else if (key == "sigma_step") cfg.sigma_step = cubetile::csv::parse_double(value, "sigma_step");
            else if (key == "q_max") cfg.q_max = static_cast<int>(cubetile::csv::parse_long(value, "q_max"));
            else if (key == "bandwidth_profiles")
                cfg.bandwidth_profiles = parse_double_list(value, "bandwidth profile");
            else throw cubetile::data_error("unknown config key '" + key + "'");
        } catch (const cubetile::data_error& e) {
            throw cubetile::data_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

// Streams CSV to --out when given, stdout otherwise.
void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cubetile::data_error("cannot open output file: " + path);
    out << content;
    if (!out) throw cubetile::data_error("failed writing output file: " + path);
}

cubetile::BandwidthTrace bandwidth_from_arg(const std::string& arg,
                                            const std::vector<int>& chunks) {
    // a plain number means a constant trace over the table's chunks
    try {
        const double bps = cubetile::csv::parse_double(arg, "bandwidth");
        return cubetile::constant_bandwidth_trace(chunks, bps);
    } catch (const cubetile::data_error&) {
        return cubetile::load_bandwidth_trace(arg);
    }
}

int run(int argc, char** argv) {
    const CliConfig cfg = load_config();

    CLI::App app{"Viewport-adaptive rate adaptation toolkit for tiled cubemap 360 video"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- priorities ----
    auto* prio_cmd = app.add_subcommand("priorities", "Print tile priorities for one viewport");
    std::string prio_layout = cfg.layout;
    double yaw = 0.0, pitch = 0.0, hfov = 90.0;
    prio_cmd->set_version_flag("--version", kVersion);
    prio_cmd->add_option("--layout", prio_layout, "tiled_cubemap_1 or tiled_cubemap_2")
        ->capture_default_str();
    prio_cmd->add_option("--yaw", yaw, "viewport yaw in degrees")->capture_default_str();
    prio_cmd->add_option("--pitch", pitch, "viewport pitch in degrees")->capture_default_str();
    prio_cmd->add_option("--hfov", hfov, "horizontal field of view in degrees")->capture_default_str();

    // ---- ladder ----
    auto* ladder_cmd = app.add_subcommand("ladder", "Fit a quality ladder from an R-D sweep");
    std::string sweep_path, ladder_out;
    std::string targets_arg;
    ladder_cmd->set_version_flag("--version", kVersion);
    ladder_cmd->add_option("--sweep", sweep_path, "R-D sweep CSV (chunk,tile,qp,bitrate_bps,psnr_db)")
        ->required();
    ladder_cmd->add_option("--targets", targets_arg, "comma-separated PSNR targets, low to high");
    ladder_cmd->add_option("--out", ladder_out, "output manifest CSV (default stdout)");

    // ---- adapt ----
    auto* adapt_cmd = app.add_subcommand("adapt", "Run rate adaptation over viewport/bandwidth traces");
    std::string adapt_layout = cfg.layout, rates_path, viewports_path, bandwidth_arg, adapt_out;
    double sigma_step = cfg.sigma_step;
    int q_max = cfg.q_max;
    bool use_oracle = false;
    adapt_cmd->set_version_flag("--version", kVersion);
    adapt_cmd->add_option("--layout", adapt_layout, "tiled_cubemap_1 or tiled_cubemap_2")
        ->capture_default_str();
    adapt_cmd->add_option("--rates", rates_path, "rate manifest CSV")->required();
    adapt_cmd->add_option("--viewports", viewports_path, "viewport trace CSV (chunk,yaw_deg,pitch_deg)")
        ->required();
    adapt_cmd->add_option("--bandwidth", bandwidth_arg, "bandwidth trace CSV or a single bps value")
        ->required();
    adapt_cmd->add_option("--sigma-step", sigma_step, "sigma scan step")->capture_default_str();
    adapt_cmd->add_option("--q-max", q_max, "initial highest quality level")->capture_default_str();
    adapt_cmd->add_flag("--oracle", use_oracle, "use the exhaustive oracle instead of the heuristic");
    adapt_cmd->add_option("--out", adapt_out, "assignments CSV (default stdout)");

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "Trace-driven streaming session simulation");
    std::string sim_layout = cfg.layout, sim_rates, sim_viewports, sim_bandwidth;
    std::string out_report, out_assignments;
    double sim_sigma_step = cfg.sigma_step;
    int sim_q_max = cfg.q_max;
    sim_cmd->set_version_flag("--version", kVersion);
    sim_cmd->add_option("--layout", sim_layout, "tiled_cubemap_1 or tiled_cubemap_2")
        ->capture_default_str();
    sim_cmd->add_option("--rates", sim_rates, "rate manifest CSV")->required();
    sim_cmd->add_option("--viewports", sim_viewports, "viewport trace CSV")->required();
    sim_cmd->add_option("--bandwidth", sim_bandwidth, "bandwidth trace CSV or a single bps value")
        ->required();
    sim_cmd->add_option("--sigma-step", sim_sigma_step, "sigma scan step")->capture_default_str();
    sim_cmd->add_option("--q-max", sim_q_max, "initial highest quality level")->capture_default_str();
    sim_cmd->add_option("--out-report", out_report, "session report CSV (default stdout)");
    sim_cmd->add_option("--out-assignments", out_assignments, "per-tile assignments CSV");

    // ---- siti ----
    auto* siti_cmd = app.add_subcommand("siti", "SI/TI complexity analysis of raw 8-bit luma");
    std::string siti_input, frames_arg = "all", tiles_path, siti_out;
    int width = 0, height = 0;
    siti_cmd->set_version_flag("--version", kVersion);
    siti_cmd->add_option("--input", siti_input, "raw planar luma file (.y)")->required();
    siti_cmd->add_option("--width", width, "frame width in pixels")->required();
    siti_cmd->add_option("--height", height, "frame height in pixels")->required();
    siti_cmd->add_option("--frames", frames_arg, "frame count or 'all'")->capture_default_str();
    siti_cmd->add_option("--tiles", tiles_path, "tile geometry sidecar CSV (tile,x,y,w,h)");
    siti_cmd->add_option("--out", siti_out, "output CSV (default stdout)");

    // ---- storage ----
    auto* storage_cmd = app.add_subcommand("storage", "Storage model: tiled cubemap vs offset-cubemap");
    std::string storage_rates;
    std::string offset_bitrates_arg;
    int n_viewports = 30;
    double duration_s = 60.0;
    storage_cmd->set_version_flag("--version", kVersion);
    storage_cmd->add_option("--rates", storage_rates, "rate manifest CSV")->required();
    storage_cmd->add_option("--offset-bitrates", offset_bitrates_arg,
                            "per-profile offset-cubemap bitrates, comma separated");
    storage_cmd->add_option("--viewports", n_viewports, "offset-cubemap viewport count")
        ->capture_default_str();
    storage_cmd->add_option("--duration", duration_s, "content duration in seconds")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (prio_cmd->parsed()) {
        const auto layout = cubetile::build_layout(prio_layout);
        const auto pm = cubetile::assign_priorities(layout, cubetile::Viewport(yaw, pitch, hfov));
        std::ostringstream os;
        os << "tile_id,priority\n";
        for (const auto& tile : layout.tiles)
            os << cubetile::to_string(tile) << ',' << pm.at(tile) << "\n";
        std::cout << os.str();
    } else if (ladder_cmd->parsed()) {
        cubetile::QualityLadder ladder{targets_arg.empty()
                                           ? cfg.ladder_targets
                                           : parse_double_list(targets_arg, "ladder target")};
        const auto sweep = cubetile::load_rd_sweep(sweep_path);
        const auto table = cubetile::fit_ladder(sweep, ladder);
        std::ostringstream os;
        cubetile::write_rate_table(os, table);
        write_output(ladder_out, os.str());
    } else if (adapt_cmd->parsed()) {
        const auto layout = cubetile::build_layout(adapt_layout);
        const auto table = cubetile::load_rate_table(rates_path);
        const auto vtrace = cubetile::load_viewport_trace(viewports_path);
        const auto btrace = bandwidth_from_arg(bandwidth_arg, table.chunks());
        cubetile::AdaptationConfig acfg;
        acfg.sigma_step = sigma_step;
        acfg.q_max_initial = q_max;
        if (table.q_max() < q_max)
            throw cubetile::data_error("manifest has levels up to " + std::to_string(table.q_max()) +
                                       " but q_max is " + std::to_string(q_max));

        vtrace.validate();
        btrace.validate();
        const auto chunks = table.chunks();
        if (vtrace.entries.size() != chunks.size() || btrace.entries.size() != chunks.size())
            throw cubetile::data_error("traces must cover the manifest's chunk set");
        for (size_t i = 0; i < chunks.size(); ++i)
            if (vtrace.entries[i].first != chunks[i] || btrace.entries[i].first != chunks[i])
                throw cubetile::data_error("trace chunk indices do not match the manifest's");
        cubetile::SessionReport report;
        for (size_t i = 0; i < chunks.size(); ++i) {
            const auto pm = cubetile::assign_priorities(layout, vtrace.entries[i].second);
            auto a = use_oracle
                         ? cubetile::optimize_exhaustive(layout, pm, table, chunks[i],
                                                         btrace.entries[i].second, acfg)
                         : cubetile::adapt_chunk(layout, pm, table, chunks[i],
                                                 btrace.entries[i].second, acfg);
            report.priorities.push_back(pm);
            report.assignments.push_back(std::move(a));
        }
        std::ostringstream os;
        cubetile::write_assignments_csv(os, layout, table, report);
        write_output(adapt_out, os.str());
    } else if (sim_cmd->parsed()) {
        const auto layout = cubetile::build_layout(sim_layout);
        const auto table = cubetile::load_rate_table(sim_rates);
        const auto vtrace = cubetile::load_viewport_trace(sim_viewports);
        const auto btrace = bandwidth_from_arg(sim_bandwidth, table.chunks());
        cubetile::AdaptationConfig acfg;
        acfg.sigma_step = sim_sigma_step;
        acfg.q_max_initial = sim_q_max;
        const auto report = cubetile::run_session(layout, table, vtrace, btrace, acfg);
        std::ostringstream os;
        cubetile::write_report_csv(os, report);
        write_output(out_report, os.str());
        if (!out_assignments.empty()) {
            std::ostringstream as;
            cubetile::write_assignments_csv(as, layout, table, report);
            write_output(out_assignments, as.str());
        }
    } else if (siti_cmd->parsed()) {
        long frame_count = -1;
        if (frames_arg != "all")
            frame_count = cubetile::csv::parse_long(frames_arg, "frame count");
        const auto seq = cubetile::load_luma_sequence(siti_input, width, height, frame_count);
        std::ostringstream os;
        os << "tile,si,ti\n";
        if (tiles_path.empty()) {
            const auto s = cubetile::compute_siti(seq);
            os << "full," << cubetile::csv::format_double(s.si) << ','
               << cubetile::csv::format_double(s.ti) << "\n";
        } else {
            const auto geometry = cubetile::load_tile_geometry(tiles_path);
            for (const auto& [tile, rect] : geometry) {
                cubetile::LumaSequence crop;
                for (const auto& frame : seq.frames)
                    crop.frames.push_back(cubetile::tile_crop(frame, rect));
                const auto s = cubetile::compute_siti(crop);
                os << cubetile::to_string(tile) << ',' << cubetile::csv::format_double(s.si) << ','
                   << cubetile::csv::format_double(s.ti) << "\n";
            }
        }
        write_output(siti_out, os.str());
    } else if (storage_cmd->parsed()) {
        const auto table = cubetile::load_rate_table(storage_rates);
        cubetile::StorageScenario scenario;
        scenario.n_viewports = n_viewports;
        scenario.duration_s = duration_s;
        if (!offset_bitrates_arg.empty())
            scenario.offset_bitrates_bps = parse_double_list(offset_bitrates_arg, "offset bitrate");
        else
            scenario.offset_bitrates_bps = cfg.bandwidth_profiles;
        scenario.ladder_levels = table.q_max() + 1;

        const double offset_bytes = cubetile::storage_offset_cubemap(scenario);
        const double tiled_bytes = cubetile::storage_tiled_cubemap(table, duration_s);
        auto mb_per_min = [duration_s](double bytes) {
            return (bytes / 1e6) / (duration_s / 60.0);
        };
        std::ostringstream os;
        os << "scheme,bytes,mb_per_min\n";
        os << "offset_cubemap," << cubetile::csv::format_double(offset_bytes) << ','
           << cubetile::csv::format_double(mb_per_min(offset_bytes)) << "\n";
        os << "tiled_cubemap," << cubetile::csv::format_double(tiled_bytes) << ','
           << cubetile::csv::format_double(mb_per_min(tiled_bytes)) << "\n";
        os << "savings_percent,"
           << cubetile::csv::format_double(cubetile::storage_savings_percent(offset_bytes, tiled_bytes))
           << "\n";
        std::cout << os.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cubetile::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cubetile::internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
