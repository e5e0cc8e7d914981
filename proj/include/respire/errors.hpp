#pragma once

#include <stdexcept>
#include <string>

namespace respire {

// Error taxonomy shared by the C++ surface and the C API status codes.
enum class ErrorCode {
    ok = 0,
    format,
    unsupported,
    empty_input,
    all_silent,
    parameter,
    schema,
    ingest,
    pairing,
    fold,
    metric,
    degenerate_labels,
    degenerate_variance,
    io,
    internal,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define RESPIRE_DEFINE_ERROR(NAME, CODE)                       \
    class NAME : public Error {                                \
    public:                                                    \
        explicit NAME(const std::string& what)                 \
            : Error(ErrorCode::CODE, what) {}                  \
    }

RESPIRE_DEFINE_ERROR(FormatError, format);
RESPIRE_DEFINE_ERROR(UnsupportedError, unsupported);
RESPIRE_DEFINE_ERROR(EmptyInputError, empty_input);
RESPIRE_DEFINE_ERROR(AllSilentError, all_silent);
RESPIRE_DEFINE_ERROR(ParameterError, parameter);
RESPIRE_DEFINE_ERROR(SchemaError, schema);
RESPIRE_DEFINE_ERROR(IngestError, ingest);
RESPIRE_DEFINE_ERROR(PairingError, pairing);
RESPIRE_DEFINE_ERROR(FoldError, fold);
RESPIRE_DEFINE_ERROR(MetricError, metric);
RESPIRE_DEFINE_ERROR(DegenerateLabelsError, degenerate_labels);
RESPIRE_DEFINE_ERROR(DegenerateVarianceError, degenerate_variance);
RESPIRE_DEFINE_ERROR(IoError, io);

#undef RESPIRE_DEFINE_ERROR

}  // namespace respire
