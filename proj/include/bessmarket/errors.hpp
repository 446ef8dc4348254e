#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bessmarket {

enum class Errc {
    malformed_timestamp,
    malformed_value,
    duplicate_hour,
    cap_violation,
    schema_mismatch,
    negative_band_price,
    misaligned_row,
    invalid_day_length,
    inconsistent_reserve_data,
    empty_input,
    disjoint_grids,
    invalid_params,
    config_error,
    io_error,
    http_error,
    auth_missing,
    schema_drift,
    analysis_error,
};

std::string_view errc_name(Errc code);

/// Error with an optional source location (row number and field name) for
/// ingestion failures.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message, long row = -1, std::string field = {});

    [[nodiscard]] Errc code() const noexcept { return code_; }
    [[nodiscard]] long row() const noexcept { return row_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

  private:
    Errc code_;
    long row_;
    std::string field_;
};

/// Non-fatal ingestion or conversion finding, reported alongside results.
struct Warning {
    std::string kind;
    long row = -1;
    std::string message;
};

}  // namespace bessmarket
