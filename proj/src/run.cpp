#include "micronap/run.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "micronap/analysis.hpp"
#include "micronap/common.hpp"
#include "micronap/error_models.hpp"
#include "micronap/reports.hpp"
#include "micronap/trace_engine.hpp"
#include "micronap/trace_io.hpp"

namespace micronap {

namespace {

int guard(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "micronap: config error: %s\n", e.what());
        return kExitConfig;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "micronap: config error: %s\n", e.what());
        return kExitConfig;
    } catch (const InputError& e) {
        std::fprintf(stderr, "micronap: input error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "micronap: internal error: %s\n", e.what());
        return kExitInternal;
    }
}

HardwareProfile resolve_profile(const std::string& path) {
    if (path.empty()) return HardwareProfile::ar9280();
    return HardwareProfile::load_file(path);
}

unsigned resolve_workers(int requested, std::size_t jobs) {
    if (requested < 0) throw ConfigError("workers must be >= 0");
    unsigned w = requested > 0 ? static_cast<unsigned>(requested)
                               : std::thread::hardware_concurrency();
    if (w == 0) w = 1;
    return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(jobs, 1)));
}

// Runs fn(0..n-1) on a small worker pool. The first exception wins and is
// rethrown on the calling thread after all workers drain.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mtx;
    std::exception_ptr first_err;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!first_err) first_err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_err) std::rethrow_exception(first_err);
}

std::string sibling_path(const std::string& out_path, const char* suffix) {
    std::filesystem::path p(out_path);
    p.replace_extension();
    return p.string() + suffix;
}

std::string decision_line(const DecisionEvent& ev) {
    std::ostringstream out;
    out << "ts=" << ev.timestamp_us << " sta=" << ev.station.to_string()
        << " kind=" << to_string(ev.frame_kind);
    if (ev.decision.doze) {
        out << " decision=doze dt=" << ev.decision.dt_sleep_us
            << " waste=" << ev.decision.waste_us
            << " nav=" << (ev.decision.nav_extended ? 1 : 0);
    } else {
        out << " decision=stay reason=" << to_string(ev.decision.reason);
    }
    out << '\n';
    return out.str();
}

// Every ledger must satisfy these regardless of input. A violation means the
// accounting itself broke, so the run reports an internal failure.
bool ledgers_sane(const std::vector<ActivityLedger>& ledgers) {
    for (const auto& l : ledgers) {
        for (const LedgerSide* s : {&l.baseline, &l.unap}) {
            if (s->tx_us < 0 || s->rx_us < 0 || s->ov_us < 0 || s->sleep_us < 0 ||
                s->waste_us < 0 || s->idle_us < 0)
                return false;
        }
        if (l.baseline.total_us() != l.unap.total_us()) return false;
        if (l.unap.tx_us != l.baseline.tx_us) return false;
        if (l.unap.ov_us > l.baseline.ov_us) return false;
        if (l.baseline.sleep_us != 0 || l.baseline.waste_us != 0) return false;
    }
    return true;
}

} // namespace

int run_analyze(const AnalyzeConfig& cfg) {
    return guard([&] {
        if (cfg.inputs.empty()) throw ConfigError("no input files");
        if (cfg.online_threshold_s <= 0) throw ConfigError("online threshold must be positive");
        if (cfg.battery_volts <= 0) throw ConfigError("battery voltage must be positive");
        if (cfg.format != "ndjson" && cfg.format != "pcap")
            throw ConfigError("unknown trace format: " + cfg.format);

        const HardwareProfile profile = resolve_profile(cfg.profile_path);
        const std::int64_t threshold_us =
            std::llround(cfg.online_threshold_s * 1e6);
        const unsigned workers = resolve_workers(cfg.workers, cfg.inputs.size());

        struct FileWork {
            std::vector<FrameRecord> frames;
            DiscoveryResult discovery;
            IngestStats stats;
            std::vector<ActivityLedger> ledgers;
            std::string decisions;
        };
        std::vector<FileWork> work(cfg.inputs.size());

        parallel_for(cfg.inputs.size(), workers, [&](std::size_t i) {
            work[i].frames = read_trace(cfg.inputs[i], cfg.format,
                                        static_cast<std::uint32_t>(i), work[i].stats);
            work[i].discovery = discover(work[i].frames);
        });

        // Roles are global: a station discovered in one capture keeps its
        // BSS in every other capture of the run.
        DiscoveryResult discovery;
        for (const auto& w : work) merge_discovery(discovery, w.discovery);

        const bool want_log = !cfg.decision_log_path.empty();
        parallel_for(cfg.inputs.size(), workers, [&](std::size_t i) {
            AccountConfig acct;
            acct.profile = profile;
            acct.online_threshold_us = threshold_us;
            if (want_log) {
                std::string* buf = &work[i].decisions;
                acct.decision_sink = [buf](const DecisionEvent& ev) {
                    buf->append(decision_line(ev));
                };
            }
            work[i].ledgers = account_both(work[i].frames, discovery, acct);
        });

        std::vector<std::vector<ActivityLedger>> parts;
        parts.reserve(work.size());
        IngestStats stats;
        for (auto& w : work) {
            parts.push_back(std::move(w.ledgers));
            stats += w.stats;
        }
        const auto ledgers = merge_ledgers(parts);

        if (!ledgers_sane(ledgers)) {
            std::fprintf(stderr, "micronap: internal error: ledger invariants violated\n");
            return kExitInternal;
        }

        write_text_file(cfg.out_path, ledger_csv(ledgers, profile, cfg.battery_volts));
        const std::string summary_path = sibling_path(cfg.out_path, ".summary.json");
        write_text_file(summary_path,
                        summary_json(ledgers, profile, stats, cfg.inputs.size(),
                                     discovery.aps.size(), discovery.unassociated.size(),
                                     cfg.battery_volts));

        // Echo the resolved configuration so a ledger is reproducible from
        // its own directory.
        nlohmann::ordered_json echo;
        echo["inputs"] = cfg.inputs;
        echo["format"] = cfg.format;
        echo["profile"] = {{"name", profile.name},
                           {"t_off_us", profile.t_off_us},
                           {"t_on_us", profile.t_on_us},
                           {"t_ready_us", profile.t_ready_us},
                           {"p_tx_w", profile.p_tx_w},
                           {"p_rx_w", profile.p_rx_w},
                           {"p_ov_w", profile.p_ov_w},
                           {"p_idle_w", profile.p_idle_w},
                           {"p_sleep_w", profile.p_sleep_w}};
        echo["out"] = cfg.out_path;
        if (want_log) echo["decision_log"] = cfg.decision_log_path;
        echo["online_threshold_us"] = threshold_us;
        echo["workers"] = workers;
        echo["battery_volts"] = cfg.battery_volts;
        const std::string config_path = sibling_path(cfg.out_path, ".config.json");
        write_text_file(config_path, echo.dump(2) + "\n");

        if (want_log) {
            std::string log;
            for (const auto& w : work) log += w.decisions;
            write_text_file(cfg.decision_log_path, log);
        }

        const EnergyReport rep = energy_report(ledgers, profile, cfg.battery_volts);
        std::printf("files=%zu frames=%llu stations=%zu aps=%zu unassociated=%zu\n",
                    cfg.inputs.size(), static_cast<unsigned long long>(stats.frames),
                    ledgers.size(), discovery.aps.size(), discovery.unassociated.size());
        std::printf("saved_uj=%s pct_of_overhearing_energy=%s pct_of_activity_energy=%s\n",
                    fmt_g6(rep.total_saved_uj).c_str(),
                    fmt_g6(rep.saving_pct_of_overhearing).c_str(),
                    fmt_g6(rep.saving_pct_of_activity).c_str());
        std::printf("wrote %s %s %s\n", cfg.out_path.c_str(), summary_path.c_str(),
                    config_path.c_str());
        return kExitOk;
    });
}

int run_convert(const ConvertConfig& cfg) {
    return guard([&] {
        if (cfg.inputs.empty()) throw ConfigError("no input files");

        std::vector<FrameRecord> frames;
        IngestStats stats;
        for (std::size_t i = 0; i < cfg.inputs.size(); ++i) {
            IngestStats fs;
            auto part = read_pcap(cfg.inputs[i], static_cast<std::uint32_t>(i), fs);
            frames.insert(frames.end(), part.begin(), part.end());
            stats += fs;
        }
        // Each file is monotone on its own; interleave multiple captures by
        // timestamp, stable so equal stamps keep input order.
        std::stable_sort(frames.begin(), frames.end(),
                         [](const FrameRecord& a, const FrameRecord& b) {
                             return a.timestamp_us < b.timestamp_us;
                         });
        write_ndjson(cfg.out_path, frames);
        std::printf("frames=%llu skipped_truncated=%llu skipped_malformed=%llu "
                    "missing_rate=%llu unknown_rate=%llu\n",
                    static_cast<unsigned long long>(stats.frames),
                    static_cast<unsigned long long>(stats.skipped_truncated),
                    static_cast<unsigned long long>(stats.skipped_malformed),
                    static_cast<unsigned long long>(stats.missing_rate),
                    static_cast<unsigned long long>(stats.unknown_rate));
        std::printf("wrote %s\n", cfg.out_path.c_str());
        return kExitOk;
    });
}

int run_energy(const EnergyConfig& cfg) {
    return guard([&] {
        if (cfg.ledger_path.empty()) throw ConfigError("no ledger file");
        if (cfg.battery_volts <= 0) throw ConfigError("battery voltage must be positive");
        const HardwareProfile profile = resolve_profile(cfg.profile_path);

        auto ledgers = parse_ledger_csv(cfg.ledger_path);
        // A baseline-only ledger carries no micro-sleep data; savings are
        // zero, not the whole baseline.
        for (auto& l : ledgers)
            if (l.unap.total_us() == 0 && l.baseline.total_us() > 0) l.unap = l.baseline;

        const EnergyReport rep = energy_report(ledgers, profile, cfg.battery_volts);

        std::ostringstream csv;
        csv << "mac,variant,energy_uj,energy_mwh,energy_mah,idle_energy_uj\n";
        for (const auto& e : rep.stations) {
            csv << e.mac.to_string() << ',' << to_string(e.variant) << ',' << fmt_g6(e.energy_uj)
                << ',' << fmt_g6(e.energy_mwh) << ',' << fmt_g6(e.energy_mah) << ','
                << fmt_g6(e.idle_energy_uj) << '\n';
        }
        write_text_file(cfg.out_path, csv.str());

        std::printf("stations=%zu\n", ledgers.size());
        std::printf("saved_uj=%s saved_mah=%s\n", fmt_g6(rep.total_saved_uj).c_str(),
                    fmt_g6(rep.total_saved_mah).c_str());
        std::printf("pct_of_overhearing_energy=%s pct_of_activity_energy=%s "
                    "overhearing_time_reduction_pct=%s\n",
                    fmt_g6(rep.saving_pct_of_overhearing).c_str(),
                    fmt_g6(rep.saving_pct_of_activity).c_str(),
                    fmt_g6(rep.ov_time_reduction_pct).c_str());
        std::printf("median_overhearing_fraction baseline=%s unap=%s\n",
                    fmt_g6(rep.median_ov_fraction_baseline).c_str(),
                    fmt_g6(rep.median_ov_fraction_unap).c_str());

        const auto decile = upper_decile(ledgers);
        const EnergyReport drep = energy_report(decile, profile, cfg.battery_volts);
        std::printf("upper_decile stations=%zu saved_uj=%s pct_of_activity_energy=%s\n",
                    decile.size(), fmt_g6(drep.total_saved_uj).c_str(),
                    fmt_g6(drep.saving_pct_of_activity).c_str());
        std::printf("wrote %s\n", cfg.out_path.c_str());
        return kExitOk;
    });
}

int run_ploss(const PlossConfig& cfg) {
    return guard([&] {
        if (!(cfg.ber_min > 0) || !(cfg.ber_max < 1) || cfg.ber_min > cfg.ber_max)
            throw ConfigError("ber range must satisfy 0 < min <= max < 1");
        if (cfg.points < 1) throw ConfigError("points must be >= 1");
        if (cfg.lambda_b.empty()) throw ConfigError("no burst sizes");
        for (double l : cfg.lambda_b)
            if (!(l > 0)) throw ConfigError("burst sizes must be positive");

        std::ostringstream csv;
        csv << "ber,single_bit";
        for (double l : cfg.lambda_b) csv << ",neyman_lb_" << fmt_g6(l);
        csv << '\n';

        for (int i = 0; i < cfg.points; ++i) {
            const double t = cfg.points == 1 ? 0 : static_cast<double>(i) / (cfg.points - 1);
            const double ber = cfg.ber_min * std::pow(cfg.ber_max / cfg.ber_min, t);
            csv << fmt_g6(ber) << ',' << fmt_g6(ploss_single_bit(ber));
            for (double l : cfg.lambda_b) {
                ErrorModelParams params{ber, l};
                csv << ',' << fmt_g6(ploss_neyman(params));
            }
            csv << '\n';
        }
        write_text_file(cfg.out_path, csv.str());
        std::printf("wrote %s\n", cfg.out_path.c_str());
        return kExitOk;
    });
}

int run_efficiency(const EfficiencyConfig& cfg) {
    return guard([&] {
        if (cfg.waste_us.empty()) throw ConfigError("no waste values");
        for (auto w : cfg.waste_us)
            if (w < 0) throw ConfigError("waste must be non-negative");
        if (cfg.sweep_from_us <= 0 || cfg.sweep_to_us < cfg.sweep_from_us ||
            cfg.sweep_step_us <= 0)
            throw ConfigError("bad sweep range");

        std::ostringstream csv;
        csv << "dt_us";
        for (auto w : cfg.waste_us) csv << ",eff_" << w;
        csv << '\n';
        for (std::int64_t dt = cfg.sweep_from_us; dt <= cfg.sweep_to_us;
             dt += cfg.sweep_step_us) {
            csv << dt;
            for (auto w : cfg.waste_us) {
                csv << ',';
                // Below the waste floor the nap cannot happen; leave the
                // cell empty rather than print a negative efficiency.
                if (dt >= w) csv << fmt_g6(efficiency_curve(w, dt));
            }
            csv << '\n';
        }
        write_text_file(cfg.out_path, csv.str());
        std::printf("wrote %s\n", cfg.out_path.c_str());
        return kExitOk;
    });
}

int run_applicability(const ApplicabilityConfig& cfg) {
    return guard([&] {
        const HardwareProfile profile = resolve_profile(cfg.profile_path);
        const auto rows = applicability_table(profile, PhyParams::ofdm_11a());

        std::ostringstream csv;
        csv << "rate_mbps,ack_rate_mbps,l_min,applicable,fraction\n";
        for (const auto& r : rows) {
            csv << fmt_g6(r.rate_data_mbps) << ',' << fmt_g6(r.rate_ack_mbps) << ',' << r.l_min
                << ',' << (r.applicable ? 1 : 0) << ',' << fmt_g6(r.fraction) << '\n';
        }
        write_text_file(cfg.out_path, csv.str());

        for (const auto& r : rows) {
            std::printf("rate=%s ack=%s l_min=%lld %s\n", fmt_g6(r.rate_data_mbps).c_str(),
                        fmt_g6(r.rate_ack_mbps).c_str(),
                        static_cast<long long>(r.l_min),
                        r.applicable ? "applicable" : "not_applicable");
        }
        std::printf("wrote %s\n", cfg.out_path.c_str());
        return kExitOk;
    });
}

int run_durations(const DurationsConfig& cfg) {
    return guard([&] {
        if (cfg.inputs.empty()) throw ConfigError("no input files");
        if (cfg.format != "ndjson" && cfg.format != "pcap")
            throw ConfigError("unknown trace format: " + cfg.format);

        std::vector<FrameRecord> frames;
        IngestStats stats;
        for (std::size_t i = 0; i < cfg.inputs.size(); ++i) {
            IngestStats fs;
            auto part = read_trace(cfg.inputs[i], cfg.format, static_cast<std::uint32_t>(i), fs);
            frames.insert(frames.end(), part.begin(), part.end());
            stats += fs;
        }

        const auto rows = duration_histogram(frames);
        std::uint64_t nav_frames = 0;
        for (const auto& r : rows) nav_frames += r.count;

        std::ostringstream csv;
        csv << "duration_us,count,percent,eg_fraction\n";
        for (const auto& r : rows) {
            csv << r.value << ',' << r.count << ',' << fmt_g6(r.percent) << ','
                << fmt_g6(r.eg_fraction) << '\n';
        }
        write_text_file(cfg.out_path, csv.str());
        std::printf("frames=%llu nav_frames=%llu distinct_durations=%zu\n",
                    static_cast<unsigned long long>(stats.frames),
                    static_cast<unsigned long long>(nav_frames), rows.size());
        std::printf("wrote %s\n", cfg.out_path.c_str());
        return kExitOk;
    });
}

int run_clock(const ClockConfig& cfg) {
    return guard([&] {
        if (cfg.freq_mhz <= 0) throw ConfigError("frequency must be positive");
        const double p_full = clock_power_w(cfg.freq_mhz);
        // Project a 16x downclock during naps: keep the measured idle floor,
        // swap the clock term.
        const HardwareProfile ref = HardwareProfile::ar9280();
        const double offset = ref.p_idle_w - p_full;
        const double down_freq = cfg.freq_mhz / 16.0;
        const double p_down = clock_power_w(down_freq) + offset;

        std::printf("freq_mhz=%s clock_power_w=%s\n", fmt_g6(cfg.freq_mhz).c_str(),
                    fmt_g6(p_full).c_str());
        std::printf("idle_offset_w=%s\n", fmt_g6(offset).c_str());
        std::printf("downclock_freq_mhz=%s downclock_power_w=%s\n", fmt_g6(down_freq).c_str(),
                    fmt_g6(p_down).c_str());
        return kExitOk;
    });
}

} // namespace micronap
