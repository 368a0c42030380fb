#ifndef QCCS_DEFINITIONS_HPP
#define QCCS_DEFINITIONS_HPP

#include "qccs/process.hpp"
#include "qccs/qstate.hpp"

#include <map>
#include <string>
#include <vector>

namespace qccs {

// Registry of everything a process term can reference: the qubit register,
// channel declarations, super-operators, measurements, and the defining
// equations of process constants.
struct Definitions {
    std::vector<std::string> registerNames;
    std::map<std::string, ChannelDecl> channels;
    std::map<std::string, SuperOperator> superOps;
    std::map<std::string, Measurement> measurements;
    std::map<std::string, ProcessDef> constants;

    const ChannelDecl* findChannel(const std::string& name) const {
        auto it = channels.find(name);
        return it == channels.end() ? nullptr : &it->second;
    }
    const SuperOperator* findSuperOp(const std::string& name) const {
        auto it = superOps.find(name);
        return it == superOps.end() ? nullptr : &it->second;
    }
    const Measurement* findMeasurement(const std::string& name) const {
        auto it = measurements.find(name);
        return it == measurements.end() ? nullptr : &it->second;
    }
    const ProcessDef* findConstant(const std::string& name) const {
        auto it = constants.find(name);
        return it == constants.end() ? nullptr : &it->second;
    }
};

/// Checks every constant definition body once (legality of bodies plus the
/// qv/fv containment conditions). Throws DefinitionError on the first broken
/// definition.
void checkDefinitions(const Definitions& defs);

}  // namespace qccs

#endif
