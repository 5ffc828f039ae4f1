#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dimred/experiment.hpp"
#include "dimred/tailcheck.hpp"

namespace dimred {

/// The three serialized forms of one result, ready to be written.
struct ReportBundle {
    std::string name;
    std::string csv;
    std::string json;
    std::string svg;
};

ReportBundle make_bundle(const PreservationResult& result);
ReportBundle make_bundle(const AdversarialResult& result);
ReportBundle make_bundle(const CostBoundResult& result);
ReportBundle make_bundle(const TailReport& report, const std::string& name = "tails");

/// Line plot of the q10/q50/q90 columns against d, one polyline each. The
/// seed is written into the document title.
std::string svg_quantile_plot(const std::string& title, std::uint64_t seed, std::span<const DAggregate> aggregates);

/// Empirical tail and its exp(-c t^2 d) bound against t, one polyline each.
std::string svg_tail_plot(const TailReport& report);

struct ReportFormats {
    bool csv = true;
    bool json = true;
    bool svg = true;
};

/// Writes <dir>/<name>.{csv,json,svg}; returns the paths written. Throws
/// std::runtime_error on an unwritable path.
std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle, const std::filesystem::path& dir,
                                               const ReportFormats& formats = {});

}  // namespace dimred
