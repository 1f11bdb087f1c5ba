// Copyright 2026 The pnr-scope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pnr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "pnr/analysis.hpp"
#include "pnr/errors.hpp"
#include "pnr/kernels.hpp"
#include "pnr/simulate.hpp"

namespace pnr {
namespace {

using nlohmann::json;

std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// --------------------------------------------------------------------------
// Parsing
// --------------------------------------------------------------------------

const json& require_field(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key)) {
        throw config_error("missing field '" + ctx + key + "'");
    }
    return j.at(key);
}

double require_number(const json& j, const char* key, const std::string& ctx) {
    const json& v = require_field(j, key, ctx);
    if (!v.is_number()) {
        throw config_error("field '" + ctx + key + "' must be a number");
    }
    return v.get<double>();
}

std::int64_t require_integer(const json& j, const char* key, const std::string& ctx) {
    const json& v = require_field(j, key, ctx);
    if (!v.is_number_integer()) {
        throw config_error("field '" + ctx + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

std::string require_string(const json& j, const char* key, const std::string& ctx) {
    const json& v = require_field(j, key, ctx);
    if (!v.is_string()) {
        throw config_error("field '" + ctx + key + "' must be a string");
    }
    return v.get<std::string>();
}

SourceStatistics parse_source(const json& j, const std::string& ctx) {
    const std::string family = require_string(j, "family", ctx);
    try {
        if (family == "coherent") {
            return SourceStatistics::coherent(require_number(j, "mean", ctx));
        }
        if (family == "thermal") {
            return SourceStatistics::thermal(require_number(j, "mean", ctx));
        }
        if (family == "fock") {
            return SourceStatistics::fock(static_cast<int>(require_integer(j, "n", ctx)));
        }
    } catch (const config_error& e) {
        throw config_error("field '" + ctx + "': " + e.what());
    }
    throw config_error("field '" + ctx + "family': unknown source family '" + family + "'");
}

ScanSpec parse_scan(const json& j, const std::string& ctx) {
    ScanSpec scan;
    if (j.contains("positions_m")) {
        for (const auto& v : j.at("positions_m")) {
            if (!v.is_number()) {
                throw config_error("field '" + ctx + "positions_m' must hold numbers");
            }
            scan.positions_m.push_back(v.get<double>());
        }
    }
    if (j.contains("half_width_scales")) {
        scan.half_width_scales = require_number(j, "half_width_scales", ctx);
    }
    if (j.contains("step_m")) scan.step_m = require_number(j, "step_m", ctx);
    if (j.contains("points")) {
        scan.points = static_cast<int>(require_integer(j, "points", ctx));
    }
    if (j.contains("pulses_per_position")) {
        const std::int64_t pulses = require_integer(j, "pulses_per_position", ctx);
        if (pulses < 0) {
            throw config_error("field '" + ctx + "pulses_per_position' must be >= 0");
        }
        scan.pulses_per_position = static_cast<std::uint64_t>(pulses);
    }
    if (j.contains("seed")) {
        const json& v = j.at("seed");
        if (!v.is_number_integer()) {
            throw config_error("field '" + ctx + "seed' must be an integer");
        }
        scan.seed = v.get<std::uint64_t>();
        scan.has_seed = true;
    }
    return scan;
}

// --------------------------------------------------------------------------
// Grids, curves and small writers
// --------------------------------------------------------------------------

double scan_scale(const Scenario& s) {
    switch (s.experiment) {
        case ExperimentKind::single_slit:
            return s.slit->first_null_m();
        case ExperimentKind::two_beam:
            return rayleigh_separation(*s.pinhole);
        case ExperimentKind::stats_compare:
            return *s.gaussian_waist_m;
    }
    throw numeric_error("scan_scale: unknown experiment");
}

std::vector<double> build_positions(const Scenario& s) {
    if (!s.scan.positions_m.empty()) return s.scan.positions_m;
    const double halfwidth = s.scan.half_width_scales * scan_scale(s);
    std::vector<double> x;
    if (s.scan.step_m > 0.0) {
        const int half_n = static_cast<int>(std::floor(halfwidth / s.scan.step_m));
        for (int i = -half_n; i <= half_n; ++i) x.push_back(i * s.scan.step_m);
    } else {
        const int half_n = (s.scan.points - 1) / 2;
        const double dx = halfwidth / half_n;
        for (int i = -half_n; i <= half_n; ++i) x.push_back(i * dx);
    }
    return x;
}

void append_series(std::string& csv, const std::string& series,
                   std::span<const double> x, std::span<const double> y) {
    for (size_t i = 0; i < x.size(); ++i) {
        csv += format_g(x[i]);
        csv += ',';
        csv += series;
        csv += ',';
        csv += format_g(y[i]);
        csv += '\n';
    }
}

json contrast_to_json(const ContrastReport& r) {
    return json{{"contrast", r.contrast},     {"i_max", r.i_max},
                {"i_saddle", r.i_saddle},     {"peak_x_m", r.peak_x},
                {"saddle_x_m", r.saddle_x},   {"separation_m", r.separation_m},
                {"separation_rayleigh", r.separation_rayleigh},
                {"no_dip", r.no_dip}};
}

json fwhm_to_json(const FwhmResult& r) {
    return json{{"fwhm_m", r.fwhm},       {"peak_x_m", r.peak_x},
                {"peak_value", r.peak_value}, {"left_x_m", r.left_x},
                {"right_x_m", r.right_x}, {"multimodal", r.multimodal}};
}

json fit_to_json(const FitResult& r) {
    json params = json::object();
    for (size_t i = 0; i < r.parameters.size(); ++i) {
        params[r.parameter_names[i]] = r.parameters[i];
    }
    return json{{"parameters", params},
                {"residual_sum_squares", r.residual_sum_squares},
                {"iterations", r.iterations},
                {"converged", r.converged}};
}

struct PipelineResult {
    std::map<std::string, std::string> files;  // suffix -> content
    json meta;
    std::string summary;
};

// --------------------------------------------------------------------------
// Experiment pipelines
// --------------------------------------------------------------------------

PipelineResult run_single_slit(const Scenario& s, std::uint64_t seed, unsigned threads) {
    PipelineResult out;
    const SourceStatistics& src = s.sources.front();
    const double scale = s.slit->first_null_m();
    const IrradianceProfile profile =
        IrradianceProfile::slit(*s.slit)
            .with_domain(-s.scan.half_width_scales * scale,
                         s.scan.half_width_scales * scale);
    const std::vector<double> x = build_positions(s);
    const int k_max = s.detection.k_max;

    std::string profiles_csv = "x_m,series,value\n";
    append_series(profiles_csv, "classical", x,
                  classical_mean_profile(profile, s.peak_mean, x));
    append_series(profiles_csv, "spd", x, spd_click_profile(src, profile, s.peak_mean, x));
    for (int k = 0; k <= k_max; ++k) {
        append_series(profiles_csv, "k" + std::to_string(k), x,
                      conditional_profile(src, profile, k, x, s.peak_mean));
    }

    std::vector<double> fit_data;
    if (s.scan.monte_carlo()) {
        ScanPlan plan{x, s.scan.pulses_per_position, s.detection, seed};
        const CountTable table = run_scan(src, profile, s.peak_mean, plan, threads);
        out.files["counts.csv"] = table.to_csv();
        out.meta["counts_json"] = table.to_json(s.raw);
        fit_data = reconstruct_classical(table);
        append_series(profiles_csv, "mc_classical", x, fit_data);
        append_series(profiles_csv, "mc_spd", x, reconstruct_spd(table));
        const auto rates = per_k_profiles(table);
        for (int k = 0; k <= k_max; ++k) {
            append_series(profiles_csv, "mc_k" + std::to_string(k), x, rates[k]);
        }
    } else {
        fit_data = classical_mean_profile(profile, s.peak_mean, x);
    }
    out.files["profiles.csv"] = std::move(profiles_csv);

    const PhotonNumberDistribution table = src.scaled_to_mean(s.peak_mean).truncate();
    const Curve classical_curve = [&](double xi) {
        return s.peak_mean * profile.value(xi);
    };
    const Curve spd_curve = [&](double xi) {
        return 1.0 - kernels::beamsplitter_point(table.p, 0, profile.value(xi));
    };

    if (s.analyses.count(AnalysisKind::fwhm) != 0) {
        const FwhmResult classical = fwhm(classical_curve, profile.x_lo(), profile.x_hi());
        const FwhmResult spd = fwhm(spd_curve, profile.x_lo(), profile.x_hi());
        out.meta["fwhm"]["classical"] = fwhm_to_json(classical);
        out.meta["fwhm"]["spd"] = fwhm_to_json(spd);

        std::string fwhm_csv = "k,fwhm_m,compression_vs_classical,compression_vs_spd\n";
        out.summary += "  FWHM vs detected photon number (classical " +
                       format_g(classical.fwhm * 1e3) + " mm, spd " +
                       format_g(spd.fwhm * 1e3) + " mm):\n";
        for (int k = 1; k <= k_max; ++k) {
            const Curve curve = [&, k](double xi) {
                return kernels::beamsplitter_point(table.p, k, profile.value(xi));
            };
            const FwhmResult r = fwhm(curve, profile.x_lo(), profile.x_hi());
            fwhm_csv += std::to_string(k) + ',' + format_g(r.fwhm) + ',' +
                        format_g(classical.fwhm / r.fwhm) + ',' +
                        format_g(spd.fwhm / r.fwhm) + '\n';
            out.summary += "    k=" + std::to_string(k) + "  fwhm " +
                           format_g(r.fwhm * 1e3) + " mm  (x" +
                           format_g(classical.fwhm / r.fwhm) + " vs classical)\n";
        }
        out.files["fwhm.csv"] = std::move(fwhm_csv);
    }

    if (s.analyses.count(AnalysisKind::fit) != 0) {
        size_t argmax = 0;
        for (size_t i = 1; i < fit_data.size(); ++i) {
            if (fit_data[i] > fit_data[argmax]) argmax = i;
        }
        FitOptions opt;
        opt.family = src.family();
        const FitResult fit = fit_slit_profile(
            x, fit_data, opt,
            {std::max(fit_data[argmax], 1e-6), s.slit->u_per_m(), x[argmax]});
        out.meta["fit"] = fit_to_json(fit);
        out.summary += "  least-squares fit: mu " + format_g(fit.parameters[0]) +
                       (fit.converged ? "" : "  [not converged]") + "\n";
    }
    return out;
}

PipelineResult run_two_beam(const Scenario& s, std::uint64_t seed, unsigned threads) {
    PipelineResult out;
    const SourceStatistics& src = s.sources.front();
    const double rayleigh = rayleigh_separation(*s.pinhole);
    const double halfwidth = s.scan.half_width_scales * rayleigh;
    const double s_profile = s.profile_separation_rayleigh * rayleigh;

    const IrradianceProfile base =
        IrradianceProfile::airy_disk(*s.pinhole).with_domain(-halfwidth, halfwidth);
    const IrradianceProfile tb = IrradianceProfile::two_beam(base, s_profile, s.imbalance);
    const double peak_mean = s.beam_mean * tb.peak_normalization();
    const std::vector<double> x = build_positions(s);
    const PhotonNumberDistribution table = src.scaled_to_mean(peak_mean).truncate();

    out.meta["rayleigh_m"] = rayleigh;
    out.meta["profile_separation_m"] = s_profile;
    out.meta["two_beam_normalization"] = tb.peak_normalization();
    out.meta["effective_peak_mean"] = peak_mean;
    const SparrowResult sparrow = sparrow_limit(*s.pinhole);
    out.meta["sparrow"] = {{"separation_m", sparrow.separation_m},
                           {"separation_rayleigh", sparrow.separation_rayleigh}};
    out.summary += "  Rayleigh separation " + format_g(rayleigh * 1e3) +
                   " mm; Sparrow limit " + format_g(sparrow.separation_rayleigh) +
                   " Rayleigh\n";

    // Mean photon profile follows mu(x) = mu_beam [base(x-s/2) + r base(x+s/2)].
    std::vector<double> classical(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        classical[i] = s.beam_mean * tb.unnormalized_sum(x[i]);
    }

    std::string profiles_csv = "x_m,series,value\n";
    append_series(profiles_csv, "classical", x, classical);
    append_series(profiles_csv, "spd", x, spd_click_profile(src, tb, peak_mean, x));
    for (const int k : s.contrast_k) {
        append_series(profiles_csv, "k" + std::to_string(k), x,
                      conditional_profile(src, tb, k, x, peak_mean));
    }

    std::vector<double> fit_data = classical;
    std::vector<std::vector<double>> mc_rates;
    std::vector<double> mc_classical;
    if (s.scan.monte_carlo()) {
        ScanPlan plan{x, s.scan.pulses_per_position, s.detection, seed};
        const CountTable count_table = run_scan(src, tb, peak_mean, plan, threads);
        out.files["counts.csv"] = count_table.to_csv();
        out.meta["counts_json"] = count_table.to_json(s.raw);
        mc_classical = reconstruct_classical(count_table);
        fit_data = mc_classical;
        append_series(profiles_csv, "mc_classical", x, mc_classical);
        append_series(profiles_csv, "mc_spd", x, reconstruct_spd(count_table));
        mc_rates = per_k_profiles(count_table);
        for (const int k : s.contrast_k) {
            append_series(profiles_csv, "mc_k" + std::to_string(k), x, mc_rates[k]);
        }
    }
    out.files["profiles.csv"] = std::move(profiles_csv);

    const double search_halfwidth = 0.5 * s_profile + 1.5 * rayleigh;
    if (s.analyses.count(AnalysisKind::contrast) != 0) {
        const Curve classical_curve = [&](double xi) { return tb.unnormalized_sum(xi); };
        const ContrastReport c_cl =
            contrast(classical_curve, s_profile, search_halfwidth, rayleigh);
        const Curve spd_curve = [&](double xi) {
            return 1.0 - kernels::beamsplitter_point(table.p, 0, tb.value(xi));
        };
        const ContrastReport c_spd =
            contrast(spd_curve, s_profile, search_halfwidth, rayleigh);
        out.meta["contrast"]["classical"] = contrast_to_json(c_cl);
        out.meta["contrast"]["spd"] = contrast_to_json(c_spd);
        out.summary += "  contrast at " + format_g(s.profile_separation_rayleigh) +
                       " Rayleigh: classical " + format_g(c_cl.contrast) + ", spd " +
                       format_g(c_spd.contrast) + "\n";
        for (const int k : s.contrast_k) {
            const Curve curve = [&, k](double xi) {
                return kernels::beamsplitter_point(table.p, k, tb.value(xi));
            };
            const ContrastReport c_k =
                contrast(curve, s_profile, search_halfwidth, rayleigh);
            out.meta["contrast"]["k" + std::to_string(k)] = contrast_to_json(c_k);
            if (k == s.contrast_k.back()) {
                out.summary += "  contrast at k=" + std::to_string(k) + ": " +
                               format_g(c_k.contrast) + "\n";
            }
            if (!mc_rates.empty()) {
                out.meta["contrast_mc"]["k" + std::to_string(k)] =
                    contrast_to_json(contrast_from_samples(x, mc_rates[k], c_k));
            }
        }
        if (!mc_classical.empty()) {
            out.meta["contrast_mc"]["classical"] =
                contrast_to_json(contrast_from_samples(x, mc_classical, c_cl));
        }
    }

    if (s.analyses.count(AnalysisKind::sweep) != 0) {
        const auto rows = contrast_sweep(src, *s.pinhole, s.beam_mean, s.contrast_k,
                                         s.separations_rayleigh);
        std::string csv = "s_rayleigh,C_classical,C_spd";
        for (const int k : s.contrast_k) csv += ",C_k" + std::to_string(k);
        csv += '\n';
        for (const auto& row : rows) {
            csv += format_g(row.s_rayleigh) + ',' + format_g(row.c_classical) + ',' +
                   format_g(row.c_spd);
            for (const double c : row.c_k) csv += ',' + format_g(c);
            csv += '\n';
        }
        out.files["contrast.csv"] = std::move(csv);
        out.summary += "  contrast sweep over " +
                       std::to_string(s.separations_rayleigh.size()) +
                       " separations written\n";
    }

    if (s.analyses.count(AnalysisKind::fit) != 0) {
        FitOptions opt;
        opt.family = src.family();
        opt.max_iterations = 2000;
        const FitResult fit = fit_two_beam_profile(
            x, fit_data, *s.pinhole, opt,
            {s.beam_mean, s_profile, s.imbalance, 0.0, 1.0});
        out.meta["fit"] = fit_to_json(fit);
        out.summary += "  two-beam fit: separation " + format_g(fit.parameters[1] * 1e3) +
                       " mm, imbalance " + format_g(fit.parameters[2]) +
                       (fit.converged ? "" : "  [not converged]") + "\n";
    }
    return out;
}

PipelineResult run_stats_compare(const Scenario& s, std::uint64_t seed, unsigned threads) {
    PipelineResult out;
    const double waist = *s.gaussian_waist_m;
    const IrradianceProfile profile =
        IrradianceProfile::gaussian_beam(waist).with_domain(
            -s.scan.half_width_scales * waist, s.scan.half_width_scales * waist);
    const std::vector<double> x = build_positions(s);
    const int k = s.detected_k;

    std::string profiles_csv = "x_m,series,value\n";
    append_series(profiles_csv, "classical", x,
                  classical_mean_profile(profile, s.peak_mean, x));

    const Curve classical_curve = [&](double xi) {
        return s.peak_mean * profile.value(xi);
    };
    const FwhmResult classical_fwhm =
        fwhm(classical_curve, profile.x_lo(), profile.x_hi());
    out.meta["fwhm"]["classical"] = fwhm_to_json(classical_fwhm);
    out.summary += "  classical FWHM " + format_g(classical_fwhm.fwhm / waist) +
                   " waists\n";

    for (size_t i = 0; i < s.sources.size(); ++i) {
        const SourceStatistics& src = s.sources[i];
        const std::string series =
            std::string(src.family_name()) + "_k" + std::to_string(k);
        append_series(profiles_csv, series, x,
                      conditional_profile(src, profile, k, x, s.peak_mean));

        if (s.analyses.count(AnalysisKind::fwhm) != 0) {
            const PhotonNumberDistribution table =
                src.scaled_to_mean(s.peak_mean).truncate();
            const Curve curve = [&](double xi) {
                return kernels::beamsplitter_point(table.p, k, profile.value(xi));
            };
            const FwhmResult r = fwhm(curve, profile.x_lo(), profile.x_hi());
            out.meta["fwhm"][series] = fwhm_to_json(r);
            out.meta["fwhm"][series]["vs_classical"] = r.fwhm / classical_fwhm.fwhm;
            out.summary += "  " + series + " FWHM " + format_g(r.fwhm / waist) +
                           " waists (" + format_g(r.fwhm / classical_fwhm.fwhm) +
                           " of classical)\n";
        }

        if (s.scan.monte_carlo()) {
            // Each source gets its own seed lane so adding a source does not
            // reshuffle the others.
            ScanPlan plan{x, s.scan.pulses_per_position, s.detection,
                          seed + static_cast<std::uint64_t>(i)};
            const CountTable table =
                run_scan(src, profile, s.peak_mean, plan, threads);
            append_series(profiles_csv, "mc_" + series, x, per_k_profiles(table)[k]);
        }
    }
    out.files["profiles.csv"] = std::move(profiles_csv);
    return out;
}

}  // namespace

// --------------------------------------------------------------------------
// Public surface
// --------------------------------------------------------------------------

Scenario Scenario::from_json(const json& doc) {
    if (!doc.is_object()) {
        throw config_error("scenario must be a JSON object");
    }
    Scenario s;
    s.raw = doc;
    const std::int64_t schema = require_integer(doc, "schema", "");
    if (schema != 1) {
        throw config_error("field 'schema': unsupported version " + std::to_string(schema));
    }
    s.schema = static_cast<int>(schema);
    s.name = require_string(doc, "name", "");
    if (s.name.empty() ||
        s.name.find_first_not_of(
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
            std::string::npos) {
        throw config_error("field 'name': must be a non-empty [A-Za-z0-9_-] string");
    }
    if (doc.contains("title")) s.title = require_string(doc, "title", "");

    const std::string experiment = require_string(doc, "experiment", "");
    if (experiment == "single-slit") {
        s.experiment = ExperimentKind::single_slit;
    } else if (experiment == "two-beam") {
        s.experiment = ExperimentKind::two_beam;
    } else if (experiment == "stats-compare") {
        s.experiment = ExperimentKind::stats_compare;
    } else {
        throw config_error("field 'experiment': unknown experiment '" + experiment + "'");
    }

    switch (s.experiment) {
        case ExperimentKind::single_slit: {
            const json& g = require_field(doc, "slit", "");
            s.slit = SlitGeometry{require_number(g, "width_m", "slit."),
                                  require_number(g, "wavelength_m", "slit."),
                                  require_number(g, "screen_distance_m", "slit.")};
            s.sources.push_back(parse_source(require_field(doc, "source", ""), "source."));
            s.peak_mean = require_number(doc, "peak_mean", "");
            break;
        }
        case ExperimentKind::two_beam: {
            const json& g = require_field(doc, "pinhole", "");
            s.pinhole = PinholeGeometry{require_number(g, "aperture_d_m", "pinhole."),
                                        require_number(g, "wavelength_m", "pinhole."),
                                        require_number(g, "focal_length_m", "pinhole.")};
            s.sources.push_back(parse_source(require_field(doc, "source", ""), "source."));
            s.beam_mean = require_number(doc, "beam_mean", "");
            if (doc.contains("imbalance")) {
                s.imbalance = require_number(doc, "imbalance", "");
            }
            if (doc.contains("separation_rayleigh")) {
                const json& arr = doc.at("separation_rayleigh");
                if (!arr.is_array()) {
                    throw config_error("field 'separation_rayleigh' must be an array");
                }
                for (const auto& v : arr) s.separations_rayleigh.push_back(v.get<double>());
            }
            if (doc.contains("profile_separation_rayleigh")) {
                s.profile_separation_rayleigh =
                    require_number(doc, "profile_separation_rayleigh", "");
            }
            break;
        }
        case ExperimentKind::stats_compare: {
            const json& g = require_field(doc, "gaussian", "");
            s.gaussian_waist_m = require_number(g, "waist_m", "gaussian.");
            const json& sources = require_field(doc, "sources", "");
            if (!sources.is_array() || sources.empty()) {
                throw config_error("field 'sources' must be a non-empty array");
            }
            for (size_t i = 0; i < sources.size(); ++i) {
                s.sources.push_back(parse_source(
                    sources.at(i), "sources[" + std::to_string(i) + "]."));
            }
            s.peak_mean = require_number(doc, "peak_mean", "");
            s.detected_k = static_cast<int>(require_integer(doc, "detected_k", ""));
            break;
        }
    }

    const json& det = require_field(doc, "detection", "");
    s.detection.k_max = static_cast<int>(require_integer(det, "k_max", "detection."));
    s.detection.mode = DetectionMode::number_resolving;

    if (doc.contains("contrast_k")) {
        const json& arr = doc.at("contrast_k");
        if (!arr.is_array()) throw config_error("field 'contrast_k' must be an array");
        for (const auto& v : arr) {
            if (!v.is_number_integer()) {
                throw config_error("field 'contrast_k' must hold integers");
            }
            s.contrast_k.push_back(v.get<int>());
        }
    } else if (s.experiment == ExperimentKind::two_beam) {
        for (int k = 4; k <= s.detection.k_max; ++k) s.contrast_k.push_back(k);
    }

    s.scan = parse_scan(require_field(doc, "scan", ""), "scan.");

    const json& analyses = require_field(doc, "analysis", "");
    if (!analyses.is_array()) throw config_error("field 'analysis' must be an array");
    for (const auto& a : analyses) {
        const std::string kind = a.get<std::string>();
        if (kind == "fwhm") {
            s.analyses.insert(AnalysisKind::fwhm);
        } else if (kind == "contrast") {
            s.analyses.insert(AnalysisKind::contrast);
        } else if (kind == "sweep") {
            s.analyses.insert(AnalysisKind::sweep);
        } else if (kind == "fit") {
            s.analyses.insert(AnalysisKind::fit);
        } else {
            throw config_error("field 'analysis': unknown analysis '" + kind + "'");
        }
    }
    return s;
}

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open scenario file '" + path + "'");
    }
    json doc = json::parse(in);  // parse_error propagates
    return from_json(doc);
}

ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport report;
    auto error = [&](std::string msg) { report.issues.push_back({true, std::move(msg)}); };
    auto warn = [&](std::string msg) { report.issues.push_back({false, std::move(msg)}); };

    try {
        if (s.slit) s.slit->validate();
        if (s.pinhole) s.pinhole->validate();
        if (s.gaussian_waist_m && !(*s.gaussian_waist_m > 0.0)) {
            throw config_error("gaussian.waist_m must be > 0");
        }
    } catch (const config_error& e) {
        error(std::string("geometry: ") + e.what());
    }

    try {
        s.detection.validate();
    } catch (const config_error& e) {
        error(std::string("detection.k_max: ") + e.what());
    }

    // Source/mean consistency.
    switch (s.experiment) {
        case ExperimentKind::single_slit:
            if (!(s.peak_mean > 0.0)) error("field 'peak_mean': must be > 0");
            break;
        case ExperimentKind::two_beam:
            if (!(s.beam_mean > 0.0)) error("field 'beam_mean': must be > 0");
            if (!(s.imbalance > 0.0 && s.imbalance <= 1.0)) {
                error("field 'imbalance': must be in (0, 1]");
            }
            if (s.sources.front().family() == SourceFamily::fock) {
                error("field 'source.family': two-beam scenarios need a rescalable "
                      "source (coherent or thermal)");
            }
            if (!(s.profile_separation_rayleigh > 0.0)) {
                error("field 'profile_separation_rayleigh': must be > 0");
            }
            break;
        case ExperimentKind::stats_compare:
            if (!(s.peak_mean > 0.0)) error("field 'peak_mean': must be > 0");
            if (s.detected_k < 0) error("field 'detected_k': must be >= 0");
            if (s.detected_k > s.detection.k_max) {
                error("field 'detected_k': exceeds detection.k_max");
            }
            for (const auto& src : s.sources) {
                try {
                    (void)src.scaled_to_mean(s.peak_mean);
                } catch (const config_error& e) {
                    error(std::string("field 'sources': ") + e.what());
                }
            }
            break;
    }
    if ((s.experiment == ExperimentKind::single_slit && s.sources.front().family() ==
         SourceFamily::fock)) {
        try {
            (void)s.sources.front().scaled_to_mean(s.peak_mean);
        } catch (const config_error& e) {
            error(std::string("field 'source': ") + e.what());
        }
    }

    for (const int k : s.contrast_k) {
        if (k < 0 || k > s.detection.k_max) {
            error("field 'contrast_k': entries must lie in [0, k_max]");
        }
    }

    // Analysis/experiment compatibility.
    const bool two_beam = s.experiment == ExperimentKind::two_beam;
    if (s.analyses.count(AnalysisKind::contrast) != 0 && !two_beam) {
        error("field 'analysis': contrast requires a two-beam experiment");
    }
    if (s.analyses.count(AnalysisKind::sweep) != 0 && !two_beam) {
        error("field 'analysis': sweep requires a two-beam experiment");
    }
    if (s.analyses.count(AnalysisKind::fwhm) != 0 && two_beam) {
        error("field 'analysis': fwhm applies to single-slit and stats-compare");
    }
    if (s.analyses.count(AnalysisKind::fit) != 0 &&
        s.experiment == ExperimentKind::stats_compare) {
        error("field 'analysis': fit is not available for stats-compare");
    }
    if (s.analyses.count(AnalysisKind::sweep) != 0 && s.separations_rayleigh.empty()) {
        error("field 'separation_rayleigh': required for the sweep analysis");
    }

    // Scan sanity.
    if (s.scan.positions_m.empty()) {
        if (!(s.scan.half_width_scales > 0.0)) {
            error("field 'scan.half_width_scales': must be > 0");
        }
        const bool has_step = s.scan.step_m > 0.0;
        const bool has_points = s.scan.points > 0;
        if (has_step == has_points) {
            error("field 'scan': exactly one of step_m or points is required");
        } else if (has_points && (s.scan.points < 3 || s.scan.points % 2 == 0)) {
            error("field 'scan.points': must be an odd count >= 3 so the grid "
                  "includes the beam center");
        }
    } else {
        for (size_t i = 1; i < s.scan.positions_m.size(); ++i) {
            if (s.scan.positions_m[i] <= s.scan.positions_m[i - 1]) {
                error("field 'scan.positions_m': must be strictly increasing");
                break;
            }
        }
        if (s.scan.positions_m.size() < 2) {
            error("field 'scan.positions_m': needs at least 2 positions");
        }
    }
    if (s.scan.monte_carlo() && !s.scan.has_seed) {
        error("field 'scan.seed': required when Monte Carlo pulses are requested");
    }

    // Physics advisories for two-beam sweeps.
    if (two_beam && s.pinhole && report.ok()) {
        try {
            const SparrowResult sp = sparrow_limit(*s.pinhole);
            for (const double s_r : s.separations_rayleigh) {
                if (!(s_r > 0.0)) {
                    error("field 'separation_rayleigh': entries must be > 0");
                } else if (s_r < sp.separation_rayleigh) {
                    warn("separation " + format_g(s_r) +
                         " Rayleigh is below the Sparrow limit (" +
                         format_g(sp.separation_rayleigh) +
                         " Rayleigh): the summed profile has a flat top there, no "
                         "dip can be exploited and contrast will read 0 (no-dip)");
                }
            }
            if (s.profile_separation_rayleigh > 0.0 &&
                s.profile_separation_rayleigh < sp.separation_rayleigh) {
                warn("profile_separation_rayleigh is below the Sparrow limit: the "
                     "contrast analysis will flag a no-dip profile");
            }
        } catch (const std::exception& e) {
            error(std::string("sparrow limit check failed: ") + e.what());
        }
    }
    return report;
}

unsigned env_thread_cap() {
    const char* env = std::getenv("PNR_SCOPE_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') return 0;
    return static_cast<unsigned>(std::min(cap, 1024ul));
}

RunOutputs run_scenario(const Scenario& s, const RunConfig& cfg) {
    const ValidationReport report = validate_scenario(s);
    for (const auto& issue : report.issues) {
        if (issue.is_error) {
            throw config_error(issue.message);
        }
    }

    const std::uint64_t seed = cfg.seed_override.value_or(s.scan.seed);
    unsigned threads = cfg.n_threads;
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
        if (const unsigned cap = env_thread_cap(); cap > 0) {
            threads = std::min(threads, cap);
        }
    }

    PipelineResult result;
    std::string experiment_name;
    switch (s.experiment) {
        case ExperimentKind::single_slit:
            experiment_name = "single-slit";
            result = run_single_slit(s, seed, threads);
            break;
        case ExperimentKind::two_beam:
            experiment_name = "two-beam";
            result = run_two_beam(s, seed, threads);
            break;
        case ExperimentKind::stats_compare:
            experiment_name = "stats-compare";
            result = run_stats_compare(s, seed, threads);
            break;
    }

    json meta = result.meta;
    meta["schema"] = s.schema;
    meta["scenario"] = s.raw;
    if (s.scan.monte_carlo()) {
        meta["effective_seed"] = seed;
    }

    RunOutputs outputs;
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> basenames;
    auto write_file = [&](const std::string& suffix, const std::string& content) {
        const std::string basename = s.name + "_" + suffix;
        const std::string path =
            (std::filesystem::path(cfg.out_dir) / basename).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw io_error("cannot write output file '" + path + "'");
        f << content;
        outputs.files_written.push_back(path);
        basenames.push_back(basename);
    };

    // The embedded counts document doubles as the counts.json output.
    if (meta.contains("counts_json")) {
        json counts = meta["counts_json"];
        meta.erase("counts_json");
        write_file("counts.json", counts.dump(2) + "\n");
    }
    for (const auto& [suffix, content] : result.files) {
        write_file(suffix, content);
    }
    // Base names only: the output directory must not leak into the bytes.
    basenames.push_back(s.name + "_meta.json");
    meta["outputs"] = basenames;
    write_file("meta.json", meta.dump(2) + "\n");

    outputs.summary = "scenario " + s.name + " (" + experiment_name + ")\n" +
                      (s.title.empty() ? "" : "  " + s.title + "\n") + result.summary;
    outputs.summary += "  wrote " + std::to_string(outputs.files_written.size()) +
                       " files to " + cfg.out_dir + "\n";
    return outputs;
}

Scenario load_scenario(const std::string& path_or_name) {
    if (std::filesystem::exists(path_or_name)) {
        return Scenario::from_file(path_or_name);
    }
    for (const BundledScenario& b : bundled_scenarios()) {
        if (path_or_name == b.name || path_or_name == std::string(b.name) + ".json") {
            return Scenario::from_json(json::parse(b.json_text));
        }
    }
    throw io_error("scenario '" + path_or_name +
                   "' is neither a readable file nor a bundled scenario name");
}

}  // namespace pnr
