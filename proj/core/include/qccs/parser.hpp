#ifndef QCCS_PARSER_HPP
#define QCCS_PARSER_HPP

#include "qccs/definitions.hpp"
#include "qccs/process.hpp"
#include "qccs/qstate.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qccs {

/// Half-open byte range in the source text plus the 1-based position of its
/// first character.
struct SourceSpan {
    size_t begin = 0;
    size_t end = 0;
    int line = 1;
    int column = 1;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(std::string message, SourceSpan span)
        : std::runtime_error("line " + std::to_string(span.line) + ", column " +
                             std::to_string(span.column) + ": " + message),
          span_(span) {}
    const SourceSpan& span() const { return span_; }

  private:
    SourceSpan span_;
};

struct ConfigDecl {
    Process process = Process::nil();
    QState state;
    SourceSpan span;
};

// Parsed model file: declarations plus named configurations, in source order.
struct ModelFile {
    Definitions defs;
    std::vector<std::pair<std::string, ConfigDecl>> configs;

    const ConfigDecl* findConfig(const std::string& name) const {
        for (const auto& [n, c] : configs)
            if (n == name) return &c;
        return nullptr;
    }
};

struct ParseOptions {
    int maxQubits = kDefaultMaxQubits;
    double tol = kMatrixTol;
};

/// Parses a .qccs model file. Declarations are validated here: Kraus
/// completeness, projector orthogonality/resolution, legality of every
/// definition body and configuration.
ModelFile parseModel(const std::string& text, const ParseOptions& options = {});

/// Parses a single process expression against existing declarations
/// (used for context processes and tests).
Process parseProcessText(const std::string& text, const Definitions& defs);

/// Canonical text form; parseProcessText(printProcess(p)) reproduces p.
std::string printProcess(const Process& p);

}  // namespace qccs

#endif
