#pragma once

#include <stdexcept>
#include <string>

namespace relsim {

enum class errc {
    unknown_type,
    duplicate_id,
    schema_mismatch,
    arity_mismatch,
    unknown_vertex,
    position_type_mismatch,
    parse_error,
    unknown_reference,
    dimension_mismatch,
    level_out_of_range,
    unknown_attribute,
    invalid_depth,
    depth_mismatch,
    weight_sum_invalid,
    too_few_targets,
    bad_k,
    asymmetric_matrix,
    id_mismatch,
    empty_train,
    missing_labels,
    bad_grid,
};

inline const char* errc_name(errc c) noexcept {
    switch (c) {
        case errc::unknown_type: return "UnknownType";
        case errc::duplicate_id: return "DuplicateId";
        case errc::schema_mismatch: return "SchemaMismatch";
        case errc::arity_mismatch: return "ArityMismatch";
        case errc::unknown_vertex: return "UnknownVertex";
        case errc::position_type_mismatch: return "PositionTypeMismatch";
        case errc::parse_error: return "ParseError";
        case errc::unknown_reference: return "UnknownReference";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::level_out_of_range: return "LevelOutOfRange";
        case errc::unknown_attribute: return "UnknownAttribute";
        case errc::invalid_depth: return "InvalidDepth";
        case errc::depth_mismatch: return "DepthMismatch";
        case errc::weight_sum_invalid: return "WeightSumInvalid";
        case errc::too_few_targets: return "TooFewTargets";
        case errc::bad_k: return "BadK";
        case errc::asymmetric_matrix: return "AsymmetricMatrix";
        case errc::id_mismatch: return "IdMismatch";
        case errc::empty_train: return "EmptyTrain";
        case errc::missing_labels: return "MissingLabels";
        case errc::bad_grid: return "BadGrid";
    }
    return "Error";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code),
          detail_(message) {}

    errc code() const noexcept { return code_; }

    // message without the code prefix, for re-wrapping with context
    const std::string& detail() const noexcept { return detail_; }

private:
    errc code_;
    std::string detail_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace relsim
