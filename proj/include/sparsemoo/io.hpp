#pragma once

// File formats: instance JSON, front CSV, shared number formatting.

#include <iosfwd>
#include <memory>
#include <string>

#include "json.hpp"
#include "sparsemoo/metrics.hpp"
#include "sparsemoo/problems.hpp"

namespace sparsemoo {

/// Shortest round-trip decimal ("%.17g" fallback) so outputs are byte-stable.
std::string format_double(double v);

nlohmann::json quadratic_to_json(const QuadraticInstance& inst);
QuadraticInstance quadratic_from_json(const nlohmann::json& j);

struct LoadedInstance {
    std::string type;  ///< "quadratic" or "logistic"
    std::unique_ptr<MultiObjectiveProblem> problem;
    int s = 0;
    bool logistic = false;
    nlohmann::json description;  ///< small summary for metadata
};

/// Reads an instance file. Logistic instances reference a CSV dataset
/// relative to the instance file: {"type":"logistic","dataset":...,
/// "label_column":...,"s":...}.
LoadedInstance load_instance(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

/// Columns f1..fm, support, x_1..x_n; support is 1-based, ';'-separated.
void write_front_csv(const std::string& path, const Front& front);
std::string front_csv(const Front& front);
Front read_front_csv(const std::string& path);

}  // namespace sparsemoo
