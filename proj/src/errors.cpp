#include "bessmarket/errors.hpp"

namespace bessmarket {

namespace {

std::string compose(Errc code, const std::string& message, long row, const std::string& field) {
    std::string out(errc_name(code));
    out += ": ";
    out += message;
    if (row >= 0) {
        out += " (row ";
        out += std::to_string(row);
        if (!field.empty()) {
            out += ", field ";
            out += field;
        }
        out += ")";
    } else if (!field.empty()) {
        out += " (field ";
        out += field;
        out += ")";
    }
    return out;
}

}  // namespace

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::malformed_timestamp: return "MalformedTimestamp";
        case Errc::malformed_value: return "MalformedValue";
        case Errc::duplicate_hour: return "DuplicateHour";
        case Errc::cap_violation: return "CapViolation";
        case Errc::schema_mismatch: return "SchemaMismatch";
        case Errc::negative_band_price: return "NegativeBandPrice";
        case Errc::misaligned_row: return "MisalignedRow";
        case Errc::invalid_day_length: return "InvalidDayLength";
        case Errc::inconsistent_reserve_data: return "InconsistentReserveData";
        case Errc::empty_input: return "EmptyInput";
        case Errc::disjoint_grids: return "DisjointGrids";
        case Errc::invalid_params: return "InvalidParams";
        case Errc::config_error: return "ConfigError";
        case Errc::io_error: return "IoError";
        case Errc::http_error: return "HttpError";
        case Errc::auth_missing: return "AuthMissing";
        case Errc::schema_drift: return "SchemaDrift";
        case Errc::analysis_error: return "AnalysisError";
    }
    return "UnknownError";
}

Error::Error(Errc code, const std::string& message, long row, std::string field)
    : std::runtime_error(compose(code, message, row, field)),
      code_(code),
      row_(row),
      field_(std::move(field)) {}

}  // namespace bessmarket
