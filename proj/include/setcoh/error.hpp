#ifndef SETCOH_ERROR_HPP
#define SETCOH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace setcoh {

enum class ErrorKind {
    MissingAssignment,
    AtomBudgetExceeded,
    ParseError,
    RelationMismatch,
    UnknownRule,
    NamespaceCollision,
    MalformedRecord,
    MissingSemantics,
    InsufficientRuleCoverage,
    VersionMismatch,
    CorruptFile,
    PoolExhausted,
    EmptyValidation,
    Divergence,
    UnknownId,
    LengthMismatch,
    MissingGold,
    InvalidArgument,
    Io,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::MissingAssignment: return "missing-atom-assignment";
        case ErrorKind::AtomBudgetExceeded: return "atom-budget-exceeded";
        case ErrorKind::ParseError: return "parse-error";
        case ErrorKind::RelationMismatch: return "relation-mismatch";
        case ErrorKind::UnknownRule: return "unknown-rule-id";
        case ErrorKind::NamespaceCollision: return "namespace-collision";
        case ErrorKind::MalformedRecord: return "malformed-record";
        case ErrorKind::MissingSemantics: return "missing-semantics";
        case ErrorKind::InsufficientRuleCoverage: return "insufficient-rule-coverage";
        case ErrorKind::VersionMismatch: return "version-mismatch";
        case ErrorKind::CorruptFile: return "corrupt-file";
        case ErrorKind::PoolExhausted: return "pool-exhausted";
        case ErrorKind::EmptyValidation: return "empty-validation";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::UnknownId: return "unknown-id";
        case ErrorKind::LengthMismatch: return "length-mismatch";
        case ErrorKind::MissingGold: return "missing-gold";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::Io: return "io-error";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace setcoh

#endif  // SETCOH_ERROR_HPP
