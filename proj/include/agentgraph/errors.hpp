#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace agentgraph {

// Base of every recoverable failure raised by the library. Precondition
// violations are reported with std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// graph documents
class ParseError : public Error { using Error::Error; };
class DanglingEdgeError : public Error { using Error::Error; };
class DuplicateIdError : public Error { using Error::Error; };
class DuplicateEdgeError : public Error { using Error::Error; };

class CycleError : public Error {
public:
    explicit CycleError(std::vector<std::string> cycle);
    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

// embeddings
class DimensionMismatchError : public Error { using Error::Error; };
class ZeroVectorError : public Error { using Error::Error; };
class EmptyTextError : public Error { using Error::Error; };

// tools
class ManifestParseError : public Error { using Error::Error; };
class DuplicateToolError : public Error { using Error::Error; };
class BadBehaviorSpecError : public Error { using Error::Error; };
class UnknownToolError : public Error { using Error::Error; };
class MissingArgumentError : public Error { using Error::Error; };
class TableKeyError : public Error { using Error::Error; };

// model backends and orchestration
class BackendError : public Error { using Error::Error; };

class OrchestrationError : public Error {
public:
    OrchestrationError(const std::string& last_failure, int attempts);
    const std::string& last_failure() const noexcept { return last_failure_; }
    int attempts() const noexcept { return attempts_; }

private:
    std::string last_failure_;
    int attempts_;
};

// evaluation and analysis
class EmptyExpectedGraphError : public Error { using Error::Error; };
class DegenerateSampleError : public Error { using Error::Error; };
class RankDeficiencyError : public Error { using Error::Error; };
class JudgeError : public Error { using Error::Error; };

// configuration and datasets
class ConfigError : public Error { using Error::Error; };
class ScenarioError : public Error { using Error::Error; };

} // namespace agentgraph
