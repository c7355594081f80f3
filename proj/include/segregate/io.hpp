#pragma once

#include <optional>
#include <string>
#include <vector>

namespace seg {

// %.17g round-trip formatting; '.' decimal separator regardless of locale.
std::string fmt_g17(double v);

struct CsvColumn {
    std::string name;
    std::vector<std::optional<double>> values; // nullopt renders as empty
};

void write_csv(const std::string& path, const std::vector<CsvColumn>& columns);
void write_text(const std::string& path, const std::string& content);

} // namespace seg
