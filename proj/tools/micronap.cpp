// Command line front end. Each subcommand maps onto one run_* entry point;
// all the actual work lives in the library so tests can drive it directly.

#include <string>

#include "CLI11.hpp"

#include "micronap/run.hpp"

int main(int argc, char** argv) {
    using namespace micronap;

    CLI::App app{"Trace-driven energy analysis of 802.11 micro-sleep"};
    app.require_subcommand(1);

    int rc = kExitOk;

    AnalyzeConfig acfg;
    auto* analyze = app.add_subcommand(
        "analyze", "Replay traces and write per-station activity ledgers");
    analyze->add_option("inputs", acfg.inputs, "trace files")->required();
    analyze->add_option("--format", acfg.format, "trace format: ndjson or pcap")
        ->capture_default_str();
    analyze->add_option("--profile", acfg.profile_path,
                        "hardware profile file (default: built-in AR9280)");
    analyze->add_option("--out", acfg.out_path, "ledger csv path")->capture_default_str();
    analyze->add_option("--decision-log", acfg.decision_log_path,
                        "write one line per sleep decision to this file");
    analyze
        ->add_option("--online-threshold", acfg.online_threshold_s,
                     "seconds since last transmission before a station counts as offline")
        ->capture_default_str();
    analyze->add_option("--workers", acfg.workers, "worker threads, 0 = all cores")
        ->capture_default_str();
    analyze->add_option("--battery-volts", acfg.battery_volts, "voltage for mAh conversion")
        ->capture_default_str();
    analyze->callback([&] { rc = run_analyze(acfg); });

    ConvertConfig ccfg;
    auto* convert =
        app.add_subcommand("convert", "Convert pcap captures to the normalized ndjson form");
    convert->add_option("inputs", ccfg.inputs, "pcap files")->required();
    convert->add_option("--out", ccfg.out_path, "output ndjson path")->capture_default_str();
    convert->callback([&] { rc = run_convert(ccfg); });

    EnergyConfig ecfg;
    auto* energy =
        app.add_subcommand("energy", "Energy and savings report from an activity ledger");
    energy->add_option("ledger", ecfg.ledger_path, "ledger csv from analyze")->required();
    energy->add_option("--profile", ecfg.profile_path,
                       "hardware profile file (default: built-in AR9280)");
    energy->add_option("--out", ecfg.out_path, "per-station energy csv")->capture_default_str();
    energy->add_option("--battery-volts", ecfg.battery_volts, "voltage for mAh conversion")
        ->capture_default_str();
    energy->callback([&] { rc = run_energy(ecfg); });

    PlossConfig pcfg;
    auto* ploss = app.add_subcommand(
        "ploss", "Header loss probability under single-bit and burst error models");
    ploss->add_option("--ber-min", pcfg.ber_min, "lowest bit error rate")->capture_default_str();
    ploss->add_option("--ber-max", pcfg.ber_max, "highest bit error rate")->capture_default_str();
    ploss->add_option("--points", pcfg.points, "geometric grid size")->capture_default_str();
    ploss->add_option("--lambda-b", pcfg.lambda_b, "mean burst sizes (bits)")
        ->delimiter(',')
        ->capture_default_str();
    ploss->add_option("--out", pcfg.out_path, "output csv")->capture_default_str();
    ploss->callback([&] { rc = run_ploss(pcfg); });

    EfficiencyConfig fcfg;
    auto* efficiency =
        app.add_subcommand("efficiency", "Sleep efficiency versus nap length for waste budgets");
    efficiency->add_option("--waste", fcfg.waste_us, "waste budgets in us")
        ->delimiter(',')
        ->capture_default_str();
    efficiency->add_option("--from", fcfg.sweep_from_us, "sweep start, us")
        ->capture_default_str();
    efficiency->add_option("--to", fcfg.sweep_to_us, "sweep end, us")->capture_default_str();
    efficiency->add_option("--step", fcfg.sweep_step_us, "sweep step, us")->capture_default_str();
    efficiency->add_option("--out", fcfg.out_path, "output csv")->capture_default_str();
    efficiency->callback([&] { rc = run_efficiency(fcfg); });

    ApplicabilityConfig appcfg;
    auto* applicability = app.add_subcommand(
        "applicability", "Minimum sleepable payload per rate for a hardware profile");
    applicability->add_option("--profile", appcfg.profile_path,
                              "hardware profile file (default: built-in AR9280)");
    applicability->add_option("--out", appcfg.out_path, "output csv")->capture_default_str();
    applicability->callback([&] { rc = run_applicability(appcfg); });

    DurationsConfig dcfg;
    auto* durations =
        app.add_subcommand("durations", "Histogram of NAV duration values seen in traces");
    durations->add_option("inputs", dcfg.inputs, "trace files")->required();
    durations->add_option("--format", dcfg.format, "trace format: ndjson or pcap")
        ->capture_default_str();
    durations->add_option("--out", dcfg.out_path, "output csv")->capture_default_str();
    durations->callback([&] { rc = run_durations(dcfg); });

    ClockConfig kcfg;
    auto* clock =
        app.add_subcommand("clock", "Clock-scaling power model and downclock projection");
    clock->add_option("--freq", kcfg.freq_mhz, "full clock frequency, MHz")
        ->capture_default_str();
    clock->callback([&] { rc = run_clock(kcfg); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    return rc;
}
