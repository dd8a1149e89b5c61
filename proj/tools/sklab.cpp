#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sklab/asymptotics.hpp"
#include "sklab/config.hpp"
#include "sklab/simulation.hpp"
#include "sklab/special_functions.hpp"

namespace {

constexpr const char* kVersion = "sklab 1.0.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << content;
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("SKLAB_SEED");
    if (!s || !*s) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0')
        throw std::invalid_argument("SKLAB_SEED: not an unsigned integer");
    return static_cast<std::uint64_t>(v);
}

nlohmann::json prediction_json(const sklab::asym::AsymptoticPrediction& p, double csnr_db) {
    nlohmann::json row;
    row["N"] = p.channel_dim;
    row["M"] = p.source_dim;
    row["r"] = p.r;
    row["csnr_db"] = csnr_db;
    row["d_total"] = p.d_total;
    row["sdr_db"] = p.sdr_db;
    row["opta_db"] = p.opta_sdr_db;
    row["gap_db"] = p.gap_db;
    return row;
}

int cmd_predict(const std::string& direction, double r, const std::vector<int>& n_list,
                const std::vector<int>& m_list, const std::vector<double>& csnr_db_list,
                double p_anomaly, bool finite, const std::string& out, const std::string& format) {
    using namespace sklab;
    const bool expand = direction == "expand";
    const std::vector<int>& dims = expand ? n_list : m_list;
    if (dims.empty())
        throw std::invalid_argument(std::string("missing dimension list: --") + (expand ? "N" : "M"));
    std::vector<asym::AsymptoticPrediction> rows;
    std::vector<double> row_csnr_db;
    for (double cdb : csnr_db_list) {
        const double csnr = from_db(cdb);
        for (int dim : dims) {
            asym::AsymptoticPrediction p;
            if (expand) {
                p = finite ? asym::expansion_distortion_finite(dim, r, csnr, p_anomaly)
                           : asym::expansion_distortion_asymptotic(dim, r, csnr);
            } else {
                const int n = static_cast<int>(std::lround(dim * r));
                if (std::abs(n - dim * r) > 1e-9 * dim || n < 1 || n >= dim)
                    throw std::invalid_argument("--M: M*r must be an integer below M");
                p = asym::reduction_distortion(dim, n, 1.0, csnr);
            }
            rows.push_back(p);
            row_csnr_db.push_back(cdb);
        }
    }
    std::string content;
    if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) j.push_back(prediction_json(rows[i], row_csnr_db[i]));
        content = j.dump(2) + "\n";
    } else {
        content = "N,M,r,csnr_db,d_total,sdr_db,opta_db,gap_db\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& p = rows[i];
            content += std::to_string(p.channel_dim) + "," + std::to_string(p.source_dim) + "," +
                       fmt(p.r) + "," + fmt(row_csnr_db[i]) + "," + fmt(p.d_total) + "," +
                       fmt(p.sdr_db) + "," + fmt(p.opta_sdr_db) + "," + fmt(p.gap_db) + "\n";
        }
    }
    write_output(out, content);
    return 0;
}

nlohmann::json report_json(const sklab::sim::DistortionReport& r) {
    nlohmann::json j;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["csnr_db"] = r.csnr_db;
    j["total_mse"] = r.total_mse;
    j["weak_mse"] = r.weak_mse;
    j["anomalous_mse"] = r.anomalous_mse;
    j["approx_mse"] = r.approx_mse;
    j["channel_mse"] = r.channel_mse;
    j["cross_term"] = r.cross_term;
    j["sdr_db"] = r.sdr_db;
    j["sdr_ci_db"] = r.sdr_ci_db;
    j["anomaly_rate"] = r.anomaly_rate;
    j["predicted_weak_rms"] = r.predicted_weak_rms;
    j["anomaly_threshold"] = r.anomaly_threshold;
    j["power_scale"] = r.power_scale;
    j["refine_fallbacks"] = r.refine_fallbacks;
    j["notes"] = r.notes;
    return j;
}

int cmd_simulate(const std::string& config_path, std::optional<long> trials,
                 std::optional<std::uint64_t> seed, std::optional<int> jobs,
                 const std::string& out, const std::string& format, const std::string& dump_path) {
    using namespace sklab;
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("config file not readable: " + config_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    sim::ExperimentConfig config = cfg::parse_experiment_config(text);
    if (trials) config.trials = *trials;
    if (seed) config.seed = *seed;
    else if (auto es = env_seed()) config.seed = *es;
    if (jobs) config.jobs = *jobs;
    config.validate();

    cfg::RunManifest manifest;
    manifest.config_digest = cfg::config_digest(text);
    manifest.tool_version = kVersion;
    manifest.seed = config.seed;
    manifest.started_at = cfg::iso8601_utc_now();

    std::vector<double> sweep = config.csnr_sweep_db;
    if (sweep.empty()) sweep.push_back(config.channel.csnr_db());
    std::vector<sim::DistortionReport> reports;
    std::vector<sim::TrialRecord> dump;
    const bool want_dump = !dump_path.empty();
    try {
        for (double cdb : sweep) {
            sim::ExperimentConfig point = config;
            point.channel = ChannelSpec::from_csnr_db(config.channel.power_per_dim, cdb);
            reports.push_back(
                sim::run_experiment(point, want_dump && sweep.size() == 1 ? &dump : nullptr));
        }
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(e.what()) +
                                 " (partial results discarded: " + std::to_string(reports.size()) +
                                 " of " + std::to_string(sweep.size()) + " sweep points done)");
    }

    const double r_dim = static_cast<double>(config.mapping.build().channel_dim) /
                         config.mapping.build().source_dim;
    std::string content;
    if (format == "csv") {
        content = "csnr_db,sdr_db,sdr_ci_db,opta_db,anomaly_rate,weak_mse,approx_mse,trials,seed\n";
        for (const auto& r : reports) {
            const double opta_db = 10.0 * r_dim * std::log10(1.0 + from_db(r.csnr_db));
            content += fmt(r.csnr_db) + "," + fmt(r.sdr_db) + "," + fmt(r.sdr_ci_db) + "," +
                       fmt(opta_db) + "," + fmt(r.anomaly_rate) + "," + fmt(r.weak_mse) + "," +
                       fmt(r.approx_mse) + "," + std::to_string(r.trials) + "," +
                       std::to_string(r.seed) + "\n";
        }
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : reports) j.push_back(report_json(r));
        content = j.dump(2) + "\n";
    }
    write_output(out, content);
    if (want_dump) {
        std::string lines;
        for (const auto& rec : dump) lines += sim::format_trial_record(rec) + "\n";
        write_output(dump_path, lines);
    }
    manifest.finished_at = cfg::iso8601_utc_now();
    if (!out.empty() && out != "-") {
        manifest.outputs.push_back(out);
        if (want_dump) manifest.outputs.push_back(dump_path);
        write_output(out + ".manifest.json", manifest.to_json());
    }
    return 0;
}

int cmd_pdf(const std::vector<int>& n_list, double sigma_n, double rho_min, double rho_max,
            int rho_points, const std::string& out, const std::string& format) {
    using namespace sklab;
    if (n_list.empty()) throw std::invalid_argument("--N: at least one dimension required");
    if (rho_points < 2) throw std::invalid_argument("--rho-points: at least 2 required");
    if (!(rho_max > rho_min) || rho_min < 0)
        throw std::invalid_argument("--rho-min/--rho-max: need 0 <= rho_min < rho_max");
    std::string content;
    nlohmann::json j = nlohmann::json::array();
    if (format == "csv") content = "N,rho,pdf\n";
    for (int n : n_list) {
        for (int i = 0; i < rho_points; ++i) {
            const double rho = rho_min + (rho_max - rho_min) * i / (rho_points - 1);
            const double pdf = sf::noise_norm_pdf(rho, n, sigma_n);
            if (format == "csv")
                content += std::to_string(n) + "," + fmt(rho) + "," + fmt(pdf) + "\n";
            else
                j.push_back({{"N", n}, {"rho", rho}, {"pdf", pdf}});
        }
    }
    if (format != "csv") content = j.dump(2) + "\n";
    write_output(out, content);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shannon-Kotel'nikov mapping toolbox: analytic predictions, noise-norm curves, and Monte-Carlo simulation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string direction = "expand", out, format = "csv", config_path, dump_path;
    double r = 2.0, p_anomaly = 1e-3, sigma_n = 0.1, rho_min = 0.0, rho_max = 0.3;
    int rho_points = 256;
    bool finite = false;
    std::vector<int> n_list, m_list;
    std::vector<double> csnr_db_list{20.0};
    std::optional<long> trials;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;

    auto* predict = app.add_subcommand("predict", "Closed-form distortion predictions vs OPTA");
    predict->add_option("--direction", direction, "expand or reduce")
        ->check(CLI::IsMember({"expand", "reduce"}));
    predict->add_option("--r", r, "dimension change factor N/M");
    predict->add_option("--N", n_list, "channel dimensions (expansion)")->delimiter(',');
    predict->add_option("--M", m_list, "source dimensions (reduction)")->delimiter(',');
    predict->add_option("--csnr-db", csnr_db_list, "CSNR grid in dB")->delimiter(',');
    predict->add_option("--p-anomaly", p_anomaly, "anomaly probability for finite-N corrections");
    predict->add_flag("--finite", finite, "apply finite-N quantile corrections (expansion)");
    predict->add_option("--out", out, "output path (default stdout)");
    predict->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo end-to-end experiment");
    simulate->add_option("config", config_path, "experiment config file")->required();
    simulate->add_option("--trials", trials, "override trial count");
    simulate->add_option("--seed", seed, "override seed (else SKLAB_SEED, else config)");
    simulate->add_option("--jobs", jobs, "worker thread count");
    simulate->add_option("--out", out, "output path (default stdout)");
    simulate->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--dump", dump_path, "per-trial record dump path (single-point runs)");

    auto* pdf = app.add_subcommand("pdf", "Normalized noise norm pdf curves");
    pdf->add_option("--N", n_list, "noise dimensions")->delimiter(',');
    pdf->add_option("--sigma-n", sigma_n, "noise standard deviation");
    pdf->add_option("--rho-min", rho_min, "grid start");
    pdf->add_option("--rho-max", rho_max, "grid end");
    pdf->add_option("--rho-points", rho_points, "grid size");
    pdf->add_option("--out", out, "output path (default stdout)");
    pdf->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "sklab: error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (predict->parsed())
            return cmd_predict(direction, r, n_list, m_list, csnr_db_list, p_anomaly, finite, out,
                               format);
        if (simulate->parsed())
            return cmd_simulate(config_path, trials, seed, jobs, out, format, dump_path);
        if (pdf->parsed()) return cmd_pdf(n_list, sigma_n, rho_min, rho_max, rho_points, out, format);
    } catch (const std::invalid_argument& e) {
        std::cerr << "sklab: error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "sklab: error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
